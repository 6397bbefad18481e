"""
Medições de experimento: baseline softmax-response, curvas cobertura × erro,
massa de sobreposição dos conjuntos OSP brutos e consistência das regiões de
rejeição entre alvos.
"""
import logging
from dataclasses import dataclass

import numpy as np

from app.controllers.selecao import FamiliaEndurecida, GradeSelecao, preencher_grade
from app.models.dados import ConjuntoRotulado
from app.models.decisao import REJEITA, avaliar, classificar_lote
from app.models.rede import ModeloSeletivo
from app.utils.erros import ErroEntrada

logger = logging.getLogger(__name__)


def sr_baseline(modelo: ModeloSeletivo, t: float) -> FamiliaEndurecida:
    """S_k = {k = argmax f} ∩ {max f ≥ t}."""
    return FamiliaEndurecida(modelo, t, "sr")


def endurecer_dg(modelo: ModeloSeletivo, t: float) -> FamiliaEndurecida:
    """Deep Gamblers: prevê o argmax das classes e aceita sse 1 − f_? ≥ t."""
    return FamiliaEndurecida(modelo, t, "dg")


@dataclass(frozen=True)
class PontoCurva:
    alvo: float
    erro: float
    cobertura: float
    metodo: str
    viavel: bool = True
    parametro: float = None
    t: float = None

    def to_dict(self):
        return {
            "metodo": self.metodo,
            "alvo": self.alvo,
            "erro": self.erro,
            "cobertura": self.cobertura,
            "parametro": self.parametro,
            "t": self.t,
            "viavel": self.viavel,
        }


class Receita:
    def __init__(self, metodo: str, modelos: dict, regra: str, nome_parametro: str = "mu"):
        """
        Modelos já treinados de um método e a regra com que são endurecidos.
        :param modelos: parâmetro (μ para OSP, payoff para DG, 0 para SR) → ModeloSeletivo
        """
        if not modelos:
            raise ErroEntrada(f"Receita {metodo} sem modelos")
        self.metodo = metodo
        self.modelos = dict(modelos)
        self.regra = regra
        self.nome_parametro = nome_parametro

    def grade(self, limiares, val: ConjuntoRotulado) -> GradeSelecao:
        return preencher_grade(self.modelos, limiares, val, self.regra, self.nome_parametro)

    def familia(self, parametro, t) -> FamiliaEndurecida:
        return FamiliaEndurecida(self.modelos[parametro], t, self.regra)

    @classmethod
    def osp(cls, modelos_por_mu: dict):
        return cls("osp", modelos_por_mu, "osp", "mu")

    @classmethod
    def sr(cls, modelo: ModeloSeletivo):
        return cls("sr", {0.0: modelo}, "sr", "parametro")

    @classmethod
    def dg(cls, modelos_por_payoff: dict):
        return cls("dg", modelos_por_payoff, "dg", "payoff")


def curva_cobertura_erro(receita: Receita, alvos, val: ConjuntoRotulado, teste: ConjuntoRotulado, limiares):
    """
    Para cada alvo ε (em ordem crescente) seleciona (parâmetro, t) na validação
    com o critério de erro restrito e mede (erro, cobertura) no teste.
    :return: (lista de PontoCurva, lista de ResultadoSelecao)
    """
    alvos = [float(a) for a in alvos]
    if any(b < a for a, b in zip(alvos, alvos[1:])):
        raise ErroEntrada(f"Alvos da curva devem estar em ordem crescente: {alvos}")
    grade = receita.grade(limiares, val)
    pontos, selecoes = [], []
    for eps in alvos:
        selecao = grade.escolher_erro_restrito(eps)
        metricas = avaliar(receita.familia(selecao.parametro, selecao.t), teste)
        pontos.append(
            PontoCurva(eps, metricas.erro_bruto, metricas.cobertura, receita.metodo, selecao.viavel, selecao.parametro, selecao.t)
        )
        selecoes.append(selecao)
    logger.info("Curva %s: %d pontos", receita.metodo, len(pontos))
    return pontos, selecoes


def interpolar_cobertura(pontos, eps: float) -> float:
    """Interpolação linear da cobertura entre pontos (erro, cobertura) consecutivos."""
    pontos = sorted(pontos, key=lambda p: (p.erro, p.cobertura))
    if not pontos:
        raise ErroEntrada("Curva vazia")
    return float(np.interp(eps, [p.erro for p in pontos], [p.cobertura for p in pontos]))


def sobreposicao_osp(modelo: ModeloSeletivo, t: float, dados: ConjuntoRotulado) -> float:
    """Fração de pontos em dois ou mais conjuntos brutos {f_k > t}."""
    dados.exigir_nao_vazio()
    P = modelo.scores_classes(dados.X)
    return float(np.mean((P > t).sum(axis=1) >= 2))


def tabela_sobreposicao(modelos_por_mu: dict, selecoes, dados: ConjuntoRotulado) -> list:
    """Sobreposição bruta no (μ*, t*) escolhido para cada alvo."""
    linhas = []
    for selecao in selecoes:
        valor = sobreposicao_osp(modelos_por_mu[selecao.parametro], selecao.t, dados)
        linhas.append({"mu": selecao.parametro, "t": selecao.t, "sobreposicao": valor})
    return linhas


@dataclass
class RelatorioConsistencia:
    pares: list
    maximo: float
    aninhado: bool

    def to_dict(self):
        return {
            "pares": [{"i": i, "j": j, "massa": m} for i, j, m in self.pares],
            "maximo": self.maximo,
            "aninhado": self.aninhado,
        }


def checar_consistencia(familias, dados: ConjuntoRotulado) -> RelatorioConsistencia:
    """
    Famílias em ordem crescente de alvo. Para cada i < j mede a massa de pontos
    rejeitados no alvo mais frouxo ε_j mas aceitos no mais estrito ε_i, P̂(R_j ∩ R_iᶜ).
    Massa zero em todos os pares equivale a R_j ⊂ R_i.
    """
    familias = list(familias)
    if len(familias) < 2:
        raise ErroEntrada("Consistência exige ao menos 2 famílias")
    dados.exigir_nao_vazio()
    for f in familias:
        if f.dim != dados.dim or f.num_classes != dados.num_classes:
            raise ErroEntrada(f"Família (dim={f.dim}, K={f.num_classes}) incompatível com os dados {dados!r}")

    rejeitados = [classificar_lote(f, dados.X) == REJEITA for f in familias]
    pares = []
    for i in range(len(familias)):
        for j in range(i + 1, len(familias)):
            pares.append((i, j, float(np.mean(rejeitados[j] & ~rejeitados[i]))))
    maximo = max(m for _, _, m in pares)
    return RelatorioConsistencia(pares, maximo, maximo == 0.0)
