from dataclasses import dataclass

import numpy as np

from app.utils.erros import ErroEntrada


@dataclass(frozen=True)
class Exemplo:
    """Um ponto rotulado (x_i, y_i)."""

    features: tuple
    rotulo: int

    def __post_init__(self):
        if self.rotulo < 0:
            raise ErroEntrada(f"Rótulo negativo: {self.rotulo}")


class ConjuntoRotulado:
    def __init__(self, X, y, num_classes: int = None):
        """
        Amostra rotulada; define a lei empírica P̂.
        :param X: Matriz (n, d) de features
        :param y: Vetor (n,) de rótulos inteiros em [0, K)
        :param num_classes: K. Se None, usa max(y) + 1.
        """
        X = np.array(X, dtype=np.float64)
        y = np.array(y, dtype=np.int64).reshape(-1)

        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise ErroEntrada(f"Features devem formar uma matriz (n, d), recebido ndim={X.ndim}")
        if X.shape[0] != y.shape[0]:
            raise ErroEntrada(f"{X.shape[0]} linhas de features para {y.shape[0]} rótulos")
        if y.size and y.min() < 0:
            raise ErroEntrada("Rótulos devem ser não negativos")

        if num_classes is None:
            num_classes = int(y.max()) + 1 if y.size else 1
        if y.size and y.max() >= num_classes:
            raise ErroEntrada(f"Rótulo {int(y.max())} fora de [0, {num_classes})")

        # Imutável depois de construído
        X.setflags(write=False)
        y.setflags(write=False)
        self._X = X
        self._y = y
        self.num_classes = int(num_classes)

    @property
    def X(self) -> np.ndarray:
        return self._X

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def n(self) -> int:
        return int(self._y.shape[0])

    @property
    def dim(self) -> int:
        return int(self._X.shape[1])

    @property
    def exemplos(self):
        return [Exemplo(tuple(float(v) for v in x), int(r)) for x, r in zip(self._X, self._y)]

    @classmethod
    def de_exemplos(cls, exemplos, num_classes: int, dim: int = None):
        """Monta o conjunto a partir de uma lista de Exemplo, checando a dimensão."""
        exemplos = list(exemplos)
        if dim is None:
            dim = len(exemplos[0].features) if exemplos else 1
        for i, ex in enumerate(exemplos):
            if len(ex.features) != dim:
                raise ErroEntrada(f"Exemplo {i} tem {len(ex.features)} features, esperado {dim}")
        X = np.array([ex.features for ex in exemplos], dtype=np.float64).reshape(len(exemplos), dim)
        y = np.array([ex.rotulo for ex in exemplos], dtype=np.int64)
        return cls(X, y, num_classes)

    def contagens(self) -> np.ndarray:
        """n_k para cada classe k."""
        return np.bincount(self._y, minlength=self.num_classes)

    def contagem_negativos(self, k: int) -> int:
        """n_{≠k} = n − n_k."""
        return self.n - int(self.contagens()[k])

    def subconjunto(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return ConjuntoRotulado(self._X[indices], self._y[indices], self.num_classes)

    def exigir_nao_vazio(self):
        if self.n == 0:
            raise ErroEntrada("Conjunto de dados vazio")

    def exigir_dimensao(self, dim: int):
        if self.dim != dim:
            raise ErroEntrada(f"Dimensão dos dados ({self.dim}) difere da esperada ({dim})")

    def __len__(self):
        return self.n

    def __eq__(self, outro):
        if not isinstance(outro, ConjuntoRotulado):
            return NotImplemented
        return (
            self.num_classes == outro.num_classes
            and np.array_equal(self._X, outro._X)
            and np.array_equal(self._y, outro._y)
        )

    def __repr__(self):
        return f"<ConjuntoRotulado: n={self.n} | dim={self.dim} | K={self.num_classes}>"
