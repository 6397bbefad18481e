"""
Famílias de conjuntos de decisão {S_k}, decisões seletivas e as métricas
empíricas de cobertura e erro.

Rejeição é implícita: o ponto que não cai em nenhum S_k é rejeitado.
Em famílias com sobreposição, o empate vai para o menor índice de classe.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.models.conjuntos import Conjunto
from app.models.dados import ConjuntoRotulado
from app.utils.erros import ErroEntrada

logger = logging.getLogger(__name__)

REJEITA = -1


@dataclass(frozen=True)
class DecisaoSeletiva:
    """Predict(k) quando `classe` é um índice; Reject quando `classe` é None."""

    classe: Optional[int] = None

    @classmethod
    def prever(cls, k: int):
        return cls(int(k))

    @classmethod
    def rejeitar(cls):
        return cls(None)

    @property
    def rejeitada(self) -> bool:
        return self.classe is None

    def __repr__(self):
        return "Reject" if self.rejeitada else f"Predict({self.classe})"


class FamiliaDecisao:
    def __init__(self, num_classes: int, dim: int, disjunta: bool):
        self.num_classes = int(num_classes)
        self.dim = int(dim)
        self.disjunta = bool(disjunta)

    def _pertinencia_bruta(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def pertinencia(self, X) -> np.ndarray:
        """
        Matriz booleana (n, K): entrada [i, k] diz se x_i ∈ S_k (antes do desempate).
        """
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.dim:
            raise ErroEntrada(f"Ponto com dimensão {X.shape[1]}, família definida em dimensão {self.dim}")

        pert = np.asarray(self._pertinencia_bruta(X), dtype=bool)
        if self.disjunta and pert.size and (pert.sum(axis=1) > 1).any():
            raise ErroEntrada("Família marcada como disjunta possui pontos em mais de um conjunto")
        return pert


class FamiliaConjuntos(FamiliaDecisao):
    def __init__(self, conjuntos, dim: int, disjunta: bool = False):
        """
        Família dada por descrições explícitas de conjuntos (classe finita).
        :param conjuntos: Lista de K objetos Conjunto, na ordem das classes
        """
        conjuntos = tuple(conjuntos)
        for c in conjuntos:
            if not isinstance(c, Conjunto):
                raise ErroEntrada(f"Esperado um Conjunto, recebido {type(c).__name__}")
        super().__init__(len(conjuntos), dim, disjunta)
        self.conjuntos = conjuntos

    def _pertinencia_bruta(self, X):
        if not self.conjuntos:
            return np.zeros((X.shape[0], 0), dtype=bool)
        return np.column_stack([c.contem(X) for c in self.conjuntos])

    def to_dict(self):
        return {
            "disjunta": self.disjunta,
            "dim": self.dim,
            "conjuntos": [c.to_dict() for c in self.conjuntos],
        }

    def __repr__(self):
        return f"<FamiliaConjuntos: {list(self.conjuntos)}>"


@dataclass(frozen=True)
class Metricas:
    cobertura: float
    erro_bruto: float
    erro_unilateral_por_classe: tuple
    taxa_rejeicao: float
    n: int
    aceitos: int
    erros: int
    erros_unilaterais: tuple

    @property
    def soma_erros_unilaterais(self) -> float:
        """Σ_k P̂(E^k), somado em contagens inteiras."""
        return sum(self.erros_unilaterais) / self.n

    def to_dict(self):
        return {
            "cobertura": self.cobertura,
            "erro_bruto": self.erro_bruto,
            "erro_unilateral_por_classe": list(self.erro_unilateral_por_classe),
            "taxa_rejeicao": self.taxa_rejeicao,
            "n": self.n,
        }


def desempatar(pert: np.ndarray) -> np.ndarray:
    """Índice da classe escolhida por ponto (menor índice entre os conjuntos que o contêm) ou REJEITA."""
    pert = np.asarray(pert, dtype=bool)
    if pert.shape[1] == 0:
        return np.full(pert.shape[0], REJEITA, dtype=np.int64)
    escolha = np.argmax(pert, axis=1).astype(np.int64)
    escolha[~pert.any(axis=1)] = REJEITA
    return escolha


def classificar_lote(familia: FamiliaDecisao, X) -> np.ndarray:
    return desempatar(familia.pertinencia(X))


def classificar(familia: FamiliaDecisao, x) -> DecisaoSeletiva:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != familia.dim:
        raise ErroEntrada(f"Ponto com dimensão {x.shape[0]}, família definida em dimensão {familia.dim}")
    escolha = int(classificar_lote(familia, x.reshape(1, -1))[0])
    return DecisaoSeletiva.rejeitar() if escolha == REJEITA else DecisaoSeletiva.prever(escolha)


def metricas_de_decisoes(escolha: np.ndarray, y: np.ndarray, num_classes: int) -> Metricas:
    """Métricas a partir das decisões já desempatadas (REJEITA = -1)."""
    escolha = np.asarray(escolha)
    y = np.asarray(y)
    n = int(y.shape[0])
    if n == 0:
        raise ErroEntrada("Conjunto de dados vazio")

    aceitos_mask = escolha != REJEITA
    erro_mask = aceitos_mask & (escolha != y)
    erros_por_classe = np.bincount(escolha[erro_mask], minlength=num_classes)[:num_classes]

    aceitos = int(aceitos_mask.sum())
    erros = int(erro_mask.sum())
    return Metricas(
        cobertura=aceitos / n,
        erro_bruto=erros / n,
        erro_unilateral_por_classe=tuple(int(c) / n for c in erros_por_classe),
        taxa_rejeicao=(n - aceitos) / n,
        n=n,
        aceitos=aceitos,
        erros=erros,
        erros_unilaterais=tuple(int(c) for c in erros_por_classe),
    )


def avaliar(familia: FamiliaDecisao, dados: ConjuntoRotulado) -> Metricas:
    dados.exigir_nao_vazio()
    dados.exigir_dimensao(familia.dim)
    if familia.num_classes != dados.num_classes:
        raise ErroEntrada(f"Família com K={familia.num_classes}, dados com K={dados.num_classes}")
    return metricas_de_decisoes(classificar_lote(familia, dados.X), dados.y, dados.num_classes)
