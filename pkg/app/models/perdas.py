"""
Família fixa de perdas escalares usada por `rede.backward`.

Cada perda implementa avaliar(P, Z, y) -> (valor, dL/dP, dL/dZ, extras), onde P
são as probabilidades softmax (n, S) e Z os logits. Probabilidades são
recortadas em [1e-12, 1 - 1e-12] antes de qualquer logaritmo; fora desse
intervalo a derivada do recorte é zero.
"""
from dataclasses import dataclass, field

import numpy as np

from app.utils.erros import ErroEntrada

LIMITE_PROB = 1e-12


def recortar(p: np.ndarray) -> np.ndarray:
    return np.clip(p, LIMITE_PROB, 1.0 - LIMITE_PROB)


def _dentro(p: np.ndarray) -> np.ndarray:
    return ((p >= LIMITE_PROB) & (p <= 1.0 - LIMITE_PROB)).astype(np.float64)


class PerdaEscalar:
    nome = "perda"

    def avaliar(self, P, Z, y):
        raise NotImplementedError

    def valor(self, P, Z, y) -> float:
        return self.avaliar(P, Z, y)[0]


class EntropiaCruzada(PerdaEscalar):
    """−(1/n) Σ log f_{y_i}(x_i)."""

    nome = "entropia_cruzada"

    def avaliar(self, P, Z, y):
        n = P.shape[0]
        linhas = np.arange(n)
        q = P[linhas, y]
        gP = np.zeros_like(P)
        gP[linhas, y] = -_dentro(q) / (n * recortar(q))
        return float(-np.mean(np.log(recortar(q)))), gP, None, {}


class PerdaRestrita(PerdaEscalar):
    def __init__(self, k: int):
        """L̃_k^res: média de −log f_k só sobre os exemplos da classe k."""
        self.k = int(k)
        self.nome = f"perda_restrita_{k}"

    def avaliar(self, P, Z, y):
        mascara = y == self.k
        n_k = int(mascara.sum())
        gP = np.zeros_like(P)
        if n_k == 0:
            return 0.0, gP, None, {"ausente": True}
        q = P[mascara, self.k]
        gP[mascara, self.k] = -_dentro(q) / (n_k * recortar(q))
        return float(-np.mean(np.log(recortar(q)))), gP, None, {"ausente": False}


class PerdaIrrestrita(PerdaEscalar):
    def __init__(self, k: int):
        """L̃_k: média de −log f_k sobre todos os exemplos."""
        self.k = int(k)
        self.nome = f"perda_irrestrita_{k}"

    def avaliar(self, P, Z, y):
        n = P.shape[0]
        q = P[:, self.k]
        gP = np.zeros_like(P)
        gP[:, self.k] = -_dentro(q) / (n * recortar(q))
        return float(-np.mean(np.log(recortar(q)))), gP, None, {"ausente": False}


class PerdaRestricao(PerdaEscalar):
    def __init__(self, k: int):
        """C̃_k: média de −log(1 − f_k) sobre os exemplos de classe ≠ k."""
        self.k = int(k)
        self.nome = f"restricao_{k}"

    def avaliar(self, P, Z, y):
        mascara = y != self.k
        n_neg = int(mascara.sum())
        gP = np.zeros_like(P)
        if n_neg == 0:
            return 0.0, gP, None, {"ausente": True}
        q = P[mascara, self.k]
        gP[mascara, self.k] = _dentro(q) / (n_neg * (1.0 - recortar(q)))
        return float(-np.mean(np.log(1.0 - recortar(q)))), gP, None, {"ausente": False}


@dataclass
class EstadoLagrangiano:
    """Multiplicadores λ_k, folgas φ_k e o orçamento μ."""

    lambdas: np.ndarray
    phis: np.ndarray
    mu: float
    lambda_max: float = field(default=None)

    def __post_init__(self):
        self.lambdas = np.array(self.lambdas, dtype=np.float64)
        self.phis = np.array(self.phis, dtype=np.float64)
        self.mu = float(self.mu)
        if self.lambdas.shape != self.phis.shape:
            raise ErroEntrada("λ e φ devem ter o mesmo tamanho K")
        if self.mu < 0:
            raise ErroEntrada(f"μ deve ser não negativo: {self.mu}")
        if self.lambda_max is None:
            self.lambda_max = 10.0 * self.mu
        if (self.lambdas < 0).any() or (self.phis < 0).any():
            raise ErroEntrada("λ_k e φ_k devem ser não negativos")

    @classmethod
    def inicial(cls, num_classes: int, mu: float, lambda_max: float = None):
        return cls(np.zeros(num_classes), np.zeros(num_classes), mu, lambda_max)

    def projetar(self):
        """λ_k ← clip(λ_k, 0, λ_max); φ_k ← max(φ_k, 0)."""
        np.clip(self.lambdas, 0.0, self.lambda_max, out=self.lambdas)
        np.maximum(self.phis, 0.0, out=self.phis)

    def copiar(self):
        return EstadoLagrangiano(self.lambdas.copy(), self.phis.copy(), self.mu, self.lambda_max)

    def to_dict(self):
        return {
            "lambdas": self.lambdas.tolist(),
            "phis": self.phis.tolist(),
            "mu": self.mu,
            "lambda_max": self.lambda_max,
        }

    @classmethod
    def from_dict(cls, dados):
        return cls(dados["lambdas"], dados["phis"], dados["mu"], dados.get("lambda_max"))


class PerdaLagrangiana(PerdaEscalar):
    nome = "lagrangiana"

    def __init__(self, estado: EstadoLagrangiano, irrestrita: bool = False):
        """
        M̃^res = Σ_k [L̃_k^res + λ_k (C̃_k − φ_k) + μ φ_k].
        Com irrestrita=True usa L̃_k no lugar de L̃_k^res.
        """
        self.estado = estado
        self.irrestrita = irrestrita

    def avaliar(self, P, Z, y):
        K = self.estado.lambdas.shape[0]
        total = 0.0
        gP = np.zeros_like(P)
        objetivos, restricoes, ausencias = np.zeros(K), np.zeros(K), np.zeros(K, dtype=np.int64)
        for k in range(K):
            objetivo = PerdaIrrestrita(k) if self.irrestrita else PerdaRestrita(k)
            v_obj, g_obj, _, ext_obj = objetivo.avaliar(P, Z, y)
            v_res, g_res, _, ext_res = PerdaRestricao(k).avaliar(P, Z, y)
            lam, phi = self.estado.lambdas[k], self.estado.phis[k]
            total += v_obj + lam * (v_res - phi) + self.estado.mu * phi
            gP += g_obj + lam * g_res
            objetivos[k], restricoes[k] = v_obj, v_res
            ausencias[k] = int(ext_obj["ausente"]) + int(ext_res["ausente"])
        extras = {
            "objetivos": objetivos,
            "restricoes": restricoes,
            "ausencias": ausencias,
            # ∂M/∂λ_k e ∂M/∂φ_k
            "grad_lambdas": restricoes - self.estado.phis,
            "grad_phis": self.estado.mu - self.estado.lambdas,
        }
        return float(total), gP, None, extras


class PerdaDG(PerdaEscalar):
    nome = "deep_gamblers"

    def __init__(self, payoff: float, num_classes: int):
        """−(1/n) Σ log(f_{y_i} + f_?/o), com f_? na última saída."""
        if not (1.0 <= payoff < num_classes):
            raise ErroEntrada(f"Payoff o={payoff} fora de [1, {num_classes})")
        self.payoff = float(payoff)
        self.num_classes = int(num_classes)

    def avaliar(self, P, Z, y):
        if P.shape[1] != self.num_classes + 1:
            raise ErroEntrada(f"Deep Gamblers exige K+1={self.num_classes + 1} saídas, modelo tem {P.shape[1]}")
        n = P.shape[0]
        linhas = np.arange(n)
        s = P[linhas, y] + P[:, -1] / self.payoff
        base = -_dentro(s) / (n * recortar(s))
        gP = np.zeros_like(P)
        gP[linhas, y] = base
        gP[:, -1] = base / self.payoff
        return float(-np.mean(np.log(recortar(s)))), gP, None, {}


class SondaQuadratica(PerdaEscalar):
    nome = "sonda_quadratica"

    def __init__(self, saida: int, alvos):
        """Média de (z_saida − alvo)² sobre os logits; usada para conferir o modo reverso."""
        self.saida = int(saida)
        self.alvos = np.asarray(alvos, dtype=np.float64)

    def avaliar(self, P, Z, y):
        n = Z.shape[0]
        r = Z[:, self.saida] - self.alvos
        gZ = np.zeros_like(Z)
        gZ[:, self.saida] = 2.0 * r / n
        return float(np.mean(r * r)), None, gZ, {}

