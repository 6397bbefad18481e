"""
Descrições de conjuntos do espaço de features.

Cada conjunto responde `contem(X)` com um vetor booleano (n,) para uma matriz
(n, d). São os blocos com que se montam as famílias de decisão do oráculo,
da conversão porta/preditor e dos conjuntos de confiança.
"""
import numpy as np


def _como_matriz(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    return X


class Conjunto:
    def contem(self, X) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self):
        return {"tipo": type(self).__name__}


class ConjuntoVazio(Conjunto):
    def contem(self, X):
        return np.zeros(_como_matriz(X).shape[0], dtype=bool)

    def __repr__(self):
        return "∅"


class EspacoTotal(Conjunto):
    def contem(self, X):
        return np.ones(_como_matriz(X).shape[0], dtype=bool)

    def __repr__(self):
        return "Ω"


class LimiarSuperior(Conjunto):
    def __init__(self, t: float, eixo: int = 0):
        """{x : x[eixo] > t} (estrito)."""
        self.t = float(t)
        self.eixo = int(eixo)

    def contem(self, X):
        return _como_matriz(X)[:, self.eixo] > self.t

    def to_dict(self):
        return {"tipo": "LimiarSuperior", "t": self.t, "eixo": self.eixo}

    def __repr__(self):
        return f"{{x{self.eixo} > {self.t:.6g}}}"


class LimiarInferior(Conjunto):
    def __init__(self, t: float, eixo: int = 0):
        """{x : x[eixo] ≤ t}."""
        self.t = float(t)
        self.eixo = int(eixo)

    def contem(self, X):
        return _como_matriz(X)[:, self.eixo] <= self.t

    def to_dict(self):
        return {"tipo": "LimiarInferior", "t": self.t, "eixo": self.eixo}

    def __repr__(self):
        return f"{{x{self.eixo} ≤ {self.t:.6g}}}"


class Intervalo(Conjunto):
    def __init__(self, a: float, b: float, eixo: int = 0):
        """{x : a < x[eixo] ≤ b}."""
        self.a = float(a)
        self.b = float(b)
        self.eixo = int(eixo)

    def contem(self, X):
        v = _como_matriz(X)[:, self.eixo]
        return (v > self.a) & (v <= self.b)

    def to_dict(self):
        return {"tipo": "Intervalo", "a": self.a, "b": self.b, "eixo": self.eixo}

    def __repr__(self):
        return f"{{{self.a:.6g} < x{self.eixo} ≤ {self.b:.6g}}}"


class ConjuntoExplicito(Conjunto):
    def __init__(self, pontos):
        """Lista explícita de pontos; pertinência por igualdade exata da linha."""
        self.pontos = frozenset(tuple(float(v) for v in np.atleast_1d(p)) for p in pontos)

    def contem(self, X):
        X = _como_matriz(X)
        return np.array([tuple(float(v) for v in linha) in self.pontos for linha in X], dtype=bool)

    def to_dict(self):
        return {"tipo": "ConjuntoExplicito", "pontos": sorted(list(p) for p in self.pontos)}

    def __repr__(self):
        return f"<ConjuntoExplicito: {len(self.pontos)} pontos>"


class Intersecao(Conjunto):
    def __init__(self, *partes: Conjunto):
        self.partes = tuple(partes)

    def contem(self, X):
        X = _como_matriz(X)
        resultado = np.ones(X.shape[0], dtype=bool)
        for parte in self.partes:
            resultado &= parte.contem(X)
        return resultado

    def to_dict(self):
        return {"tipo": "Intersecao", "partes": [p.to_dict() for p in self.partes]}

    def __repr__(self):
        return " ∩ ".join(repr(p) for p in self.partes)


class Uniao(Conjunto):
    def __init__(self, *partes: Conjunto):
        self.partes = tuple(partes)

    def contem(self, X):
        X = _como_matriz(X)
        resultado = np.zeros(X.shape[0], dtype=bool)
        for parte in self.partes:
            resultado |= parte.contem(X)
        return resultado

    def to_dict(self):
        return {"tipo": "Uniao", "partes": [p.to_dict() for p in self.partes]}

    def __repr__(self):
        return " ∪ ".join(repr(p) for p in self.partes) if self.partes else "∅"


class Complemento(Conjunto):
    def __init__(self, base: Conjunto):
        self.base = base

    def contem(self, X):
        return ~self.base.contem(X)

    def to_dict(self):
        return {"tipo": "Complemento", "base": self.base.to_dict()}

    def __repr__(self):
        return f"({self.base!r})ᶜ"


class Diferenca(Conjunto):
    def __init__(self, base: Conjunto, removidos):
        """base \\ ∪ removidos."""
        self.base = base
        self.removidos = tuple(removidos)

    def contem(self, X):
        X = _como_matriz(X)
        resultado = self.base.contem(X)
        for r in self.removidos:
            resultado &= ~r.contem(X)
        return resultado

    def to_dict(self):
        return {
            "tipo": "Diferenca",
            "base": self.base.to_dict(),
            "removidos": [r.to_dict() for r in self.removidos],
        }

    def __repr__(self):
        if not self.removidos:
            return repr(self.base)
        return f"{self.base!r} \\ ({' ∪ '.join(repr(r) for r in self.removidos)})"
