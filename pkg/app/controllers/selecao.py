"""
Endurecimento dos scores em conjuntos de decisão e seleção de modelo sobre a
grade (μ, t) na validação.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from app.models.dados import ConjuntoRotulado
from app.models.decisao import FamiliaDecisao
from app.models.rede import ModeloSeletivo
from app.utils.erros import ErroEntrada

logger = logging.getLogger(__name__)

REGRAS = ("osp", "sr", "dg")


def decisoes_pontuadas(modelo: ModeloSeletivo, X, regra: str = "osp"):
    """
    (classe prevista, confiança) por ponto; o ponto é aceito com limiar t sse confiança ≥ t.
      osp: confiança = f_k na classe do argmax
      sr:  confiança = max_k f_k
      dg:  argmax nas K saídas de classe, confiança = 1 − f_?
    """
    if regra not in REGRAS:
        raise ErroEntrada(f"Regra de endurecimento desconhecida: {regra}")
    P = modelo.passo_forward(X)[3]
    classes = P[:, : modelo.num_classes]
    previsto = np.argmax(classes, axis=1)
    if regra == "osp":
        confianca = classes[np.arange(classes.shape[0]), previsto]
    elif regra == "sr":
        confianca = classes.max(axis=1)
    else:
        if modelo.saidas_extras < 1:
            raise ErroEntrada("Regra dg exige um modelo com a saída de abstenção")
        confianca = 1.0 - P[:, modelo.num_classes]
    return previsto, confianca


def pertinencia_endurecida(P: np.ndarray, t: float) -> np.ndarray:
    """S_k = {f_k ≥ t} ∩ {k = argmax f}, direto sobre a matriz de scores (n, K)."""
    P = np.asarray(P, dtype=np.float64)
    previsto = np.argmax(P, axis=1)
    pert = np.zeros(P.shape, dtype=bool)
    linhas = np.arange(P.shape[0])
    pert[linhas, previsto] = P[linhas, previsto] >= t
    return pert


class FamiliaEndurecida(FamiliaDecisao):
    def __init__(self, modelo: ModeloSeletivo, t: float, regra: str = "osp"):
        """Família disjunta obtida ao limiarizar as saídas de `modelo` em t."""
        if regra not in REGRAS:
            raise ErroEntrada(f"Regra de endurecimento desconhecida: {regra}")
        super().__init__(modelo.num_classes, modelo.espec.dim_entrada, disjunta=True)
        self.modelo = modelo
        self.t = float(t)
        self.regra = regra

    def _pertinencia_bruta(self, X):
        previsto, confianca = decisoes_pontuadas(self.modelo, X, self.regra)
        pert = np.zeros((X.shape[0], self.num_classes), dtype=bool)
        pert[np.arange(X.shape[0]), previsto] = confianca >= self.t
        return pert

    def __repr__(self):
        return f"<FamiliaEndurecida: {self.regra} | t={self.t:g}>"


def endurecer(modelo: ModeloSeletivo, t: float) -> FamiliaEndurecida:
    return FamiliaEndurecida(modelo, t, "osp")


@dataclass
class GradeSelecao:
    """Contagens de aceitos e erros na validação para cada célula (parâmetro, t)."""

    parametros: tuple
    limiares: tuple
    aceitos: np.ndarray
    erros: np.ndarray
    n: int
    nome_parametro: str = "mu"

    @property
    def cobertura(self) -> np.ndarray:
        return self.aceitos / self.n

    @property
    def erro(self) -> np.ndarray:
        return self.erros / self.n

    def linhas(self):
        """Uma linha por célula, na ordem (parâmetro, t)."""
        for i, p in enumerate(self.parametros):
            for j, t in enumerate(self.limiares):
                yield {
                    self.nome_parametro: p,
                    "t": t,
                    "cobertura": self.aceitos[i, j] / self.n,
                    "erro": self.erros[i, j] / self.n,
                }

    def _melhor(self, chave):
        celulas = [(i, j) for i in range(len(self.parametros)) for j in range(len(self.limiares))]
        return min(celulas, key=chave)

    def escolher_erro_restrito(self, eps: float):
        """
        Maior cobertura com Ê ≤ eps; empate: maior t, depois menor parâmetro.
        Sem célula viável: menor erro (depois maior cobertura, maior t, menor parâmetro).
        """
        limite = math.floor(eps * self.n + 1e-9)
        viavel = bool((self.erros <= limite).any())
        if viavel:
            i, j = self._melhor(
                lambda c: (
                    self.erros[c] > limite,
                    -self.aceitos[c],
                    -self.limiares[c[1]],
                    self.parametros[c[0]],
                )
            )
        else:
            i, j = self._melhor(
                lambda c: (self.erros[c], -self.aceitos[c], -self.limiares[c[1]], self.parametros[c[0]])
            )
        return self._resultado(i, j, viavel)

    def escolher_cobertura_restrita(self, rho: float):
        """
        Menor erro com Ĉ ≥ rho; empate: maior cobertura, depois maior t.
        Sem célula viável: maior cobertura.
        """
        minimo = math.ceil(rho * self.n - 1e-9)
        viavel = bool((self.aceitos >= minimo).any())
        if viavel:
            i, j = self._melhor(
                lambda c: (
                    self.aceitos[c] < minimo,
                    self.erros[c],
                    -self.aceitos[c],
                    -self.limiares[c[1]],
                    self.parametros[c[0]],
                )
            )
        else:
            i, j = self._melhor(
                lambda c: (-self.aceitos[c], self.erros[c], -self.limiares[c[1]], self.parametros[c[0]])
            )
        return self._resultado(i, j, viavel)

    def _resultado(self, i, j, viavel):
        resultado = ResultadoSelecao(
            parametro=self.parametros[i],
            t=self.limiares[j],
            cobertura=float(self.aceitos[i, j] / self.n),
            erro=float(self.erros[i, j] / self.n),
            viavel=viavel,
            grade=self,
        )
        if not viavel:
            logger.warning("Nenhuma célula viável; usando a melhor disponível %s", resultado)
        return resultado


@dataclass
class ResultadoSelecao:
    parametro: float
    t: float
    cobertura: float
    erro: float
    viavel: bool
    grade: GradeSelecao = None

    def to_dict(self):
        return {
            self.grade.nome_parametro if self.grade else "parametro": self.parametro,
            "t": self.t,
            "cobertura_validacao": self.cobertura,
            "erro_validacao": self.erro,
            "viavel": self.viavel,
        }

    def __repr__(self):
        return f"<ResultadoSelecao: parâmetro={self.parametro:g} t={self.t:g} Ĉ={self.cobertura:.4f} Ê={self.erro:.4f} viável={self.viavel}>"


def preencher_grade(modelos: dict, limiares, val: ConjuntoRotulado, regra: str = "osp", nome_parametro: str = "mu") -> GradeSelecao:
    """
    Avalia cada (modelo, t) na validação. As famílias endurecidas são disjuntas,
    então Σ_k P̂(E^k) coincide com o erro bruto e basta uma contagem.
    """
    if not modelos:
        raise ErroEntrada("Grade vazia: nenhum modelo")
    limiares = tuple(float(t) for t in limiares)
    if not limiares:
        raise ErroEntrada("Grade vazia: nenhum limiar")
    val.exigir_nao_vazio()

    parametros = tuple(sorted(modelos))
    T = np.asarray(limiares)
    aceitos = np.zeros((len(parametros), len(limiares)), dtype=np.int64)
    erros = np.zeros_like(aceitos)
    for i, p in enumerate(parametros):
        modelo = modelos[p]
        if modelo.num_classes != val.num_classes:
            raise ErroEntrada(f"Modelo com K={modelo.num_classes}, validação com K={val.num_classes}")
        previsto, confianca = decisoes_pontuadas(modelo, val.X, regra)
        aceito = confianca[None, :] >= T[:, None]
        errado = previsto != val.y
        aceitos[i] = aceito.sum(axis=1)
        erros[i] = (aceito & errado[None, :]).sum(axis=1)
    logger.debug("Grade %s preenchida: %d × %d células", regra, len(parametros), len(limiares))
    return GradeSelecao(parametros, limiares, aceitos, erros, val.n, nome_parametro)


def selecionar_erro_restrito(modelos: dict, limiares, val: ConjuntoRotulado, eps: float, regra: str = "osp") -> ResultadoSelecao:
    return preencher_grade(modelos, limiares, val, regra).escolher_erro_restrito(eps)


def selecionar_cobertura_restrita(modelos: dict, limiares, val: ConjuntoRotulado, rho: float, regra: str = "osp") -> ResultadoSelecao:
    return preencher_grade(modelos, limiares, val, regra).escolher_cobertura_restrita(rho)


def dividir_dados(dados: ConjuntoRotulado, fracoes, semente: int):
    """Partição embaralhada (treino, validação, teste) com semente própria de divisão."""
    dados.exigir_nao_vazio()
    rng = np.random.default_rng(semente)
    ordem = rng.permutation(dados.n)
    n_treino = int(math.floor(fracoes[0] * dados.n))
    n_val = int(math.floor(fracoes[1] * dados.n))
    partes = np.split(ordem, [n_treino, n_treino + n_val])
    if any(p.size == 0 for p in partes):
        raise ErroEntrada(f"Divisão com parte vazia para n={dados.n} e frações {tuple(fracoes)}")
    return tuple(dados.subconjunto(np.sort(p)) for p in partes)
