"""
Treino: aquecimento por entropia cruzada, as perdas OSP relaxadas, a
Lagrangiana M̃^res e sua otimização por descida-subida estocástica em duas
escalas de tempo (SGDA). Inclui também o baseline Deep Gamblers.
"""
import logging
from collections import Counter

import numpy as np

from app.models.configuracao import ConfigDG, ConfigTreino
from app.models.dados import ConjuntoRotulado
from app.models.perdas import (
    EntropiaCruzada,
    EstadoLagrangiano,
    PerdaDG,
    PerdaLagrangiana,
    PerdaRestricao,
    PerdaRestrita,
)
from app.models.rede import EspecBackbone, ModeloSeletivo, backward
from app.models.registro import RegistroEpoca
from app.utils.erros import ErroEntrada, ErroNumerico

logger = logging.getLogger(__name__)


class OtimizadorSGD:
    def passo(self, parametros, gradientes, taxa: float):
        for p, g in zip(parametros, gradientes):
            p -= taxa * g


class OtimizadorAdam:
    def __init__(self, parametros, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        """Escala adaptativa por parâmetro (momentos de 1ª e 2ª ordem)."""
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in parametros]
        self.v = [np.zeros_like(p) for p in parametros]
        self.t = 0

    def passo(self, parametros, gradientes, taxa: float):
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(parametros, gradientes, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= taxa * (m / c1) / (np.sqrt(v / c2) + self.eps)


def _lotes(n: int, tamanho: int, rng: np.random.Generator):
    """Índices de cada minibatch. Lote do tamanho do conjunto não é embaralhado."""
    if tamanho >= n:
        yield np.arange(n)
        return
    ordem = rng.permutation(n)
    for inicio in range(0, n, tamanho):
        yield ordem[inicio : inicio + tamanho]


def _checar_entrada(dados: ConjuntoRotulado, espec: EspecBackbone):
    dados.exigir_nao_vazio()
    if dados.dim != espec.dim_entrada:
        raise ErroEntrada(f"Dados com dimensão {dados.dim}, backbone espera {espec.dim_entrada}")


def _descer(modelo, dados, perda, epocas, taxa, rng, tamanho_lote):
    """SGD simples sobre todos os parâmetros."""
    otimizador = OtimizadorSGD()
    for _ in range(epocas):
        for idx in _lotes(dados.n, tamanho_lote, rng):
            _, grad = backward(modelo, dados.subconjunto(idx), perda)
            otimizador.passo(modelo.parametros(), grad.partes, taxa)
    return modelo


def aquecer(dados: ConjuntoRotulado, espec: EspecBackbone, num_classes: int, epocas: int, taxa: float, semente: int, tamanho_lote: int = 128) -> ModeloSeletivo:
    """
    Warm start: treina a rede inteira em entropia cruzada multiclasse.
    Com epocas = 0 devolve a inicialização aleatória da semente.
    """
    _checar_entrada(dados, espec)
    modelo = ModeloSeletivo.inicializar(espec, num_classes, semente)
    rng = np.random.default_rng([semente, 1])
    _descer(modelo, dados, EntropiaCruzada(), epocas, taxa, rng, tamanho_lote)
    logger.debug("Aquecimento concluído: %d épocas, taxa %g", epocas, taxa)
    return modelo


# --- perdas avaliadas sobre um lote ---


def _probabilidades(modelo: ModeloSeletivo, lote: ConjuntoRotulado) -> np.ndarray:
    lote.exigir_nao_vazio()
    return modelo.passo_forward(lote.X)[3]


def perda_restrita(modelo: ModeloSeletivo, lote: ConjuntoRotulado, k: int, contador: Counter = None) -> float:
    """(1/n_k) Σ_{y_i = k} −log f_k(x_i). Sem exemplos da classe k o termo vale 0."""
    valor, _, _, extras = PerdaRestrita(k).avaliar(_probabilidades(modelo, lote), None, lote.y)
    if extras["ausente"] and contador is not None:
        contador[f"restrita_{k}"] += 1
    return valor


def perda_restricao(modelo: ModeloSeletivo, lote: ConjuntoRotulado, k: int, contador: Counter = None) -> float:
    """(1/n_{≠k}) Σ_{y_i ≠ k} −log(1 − f_k(x_i)). Sem exemplos negativos o termo vale 0."""
    valor, _, _, extras = PerdaRestricao(k).avaliar(_probabilidades(modelo, lote), None, lote.y)
    if extras["ausente"] and contador is not None:
        contador[f"restricao_{k}"] += 1
    return valor


def lagrangiana(modelo: ModeloSeletivo, lote: ConjuntoRotulado, estado: EstadoLagrangiano, irrestrita: bool = False) -> float:
    P = _probabilidades(modelo, lote)
    valor = PerdaLagrangiana(estado, irrestrita).valor(P, None, lote.y)
    if not np.isfinite(valor):
        raise ErroNumerico("Lagrangiana não finita", termo="lagrangiana")
    return valor


def perda_dg(modelo: ModeloSeletivo, lote: ConjuntoRotulado, config: ConfigDG) -> float:
    config.validar(modelo.num_classes)
    pre, ativ, Z, P = modelo.passo_forward(lote.X)
    return PerdaDG(config.payoff, modelo.num_classes).valor(P, Z, lote.y)


# --- SGDA ---


def _registro_epoca(modelo, dados, estado, epoca, ausencias) -> RegistroEpoca:
    """Valores da época medidos no conjunto de treino inteiro."""
    P = modelo.passo_forward(dados.X)[3]
    K = dados.num_classes
    objetivos = [PerdaRestrita(k).valor(P, None, dados.y) for k in range(K)]
    restricoes = [PerdaRestricao(k).valor(P, None, dados.y) for k in range(K)]
    if not (np.all(np.isfinite(objetivos)) and np.all(np.isfinite(restricoes))):
        raise ErroNumerico(f"Perdas não finitas na época {epoca}", termo="registro_epoca")
    return RegistroEpoca(epoca, sum(objetivos), restricoes, estado.lambdas, estado.phis, ausencias)


def treinar_sgda(dados: ConjuntoRotulado, espec: EspecBackbone, config: ConfigTreino):
    """
    min_(θ, w, φ) max_(λ ≥ 0) M̃^res por SGDA em duas escalas.

    Por minibatch: descida em (w, φ) com taxa_min e subida em λ com taxa_max,
    ambas a partir do mesmo ponto, seguidas da projeção λ ∈ [0, λ_max], φ ≥ 0.
    O backbone θ acumula seus gradientes e só recebe o passo a cada
    `intervalo_backbone` épocas.

    :return: (modelo, estado, log); log[0] é o estado logo após o aquecimento
    """
    _checar_entrada(dados, espec)
    K = dados.num_classes
    modelo = aquecer(dados, espec, K, config.epocas_aquecimento, config.taxa_aquecimento, config.semente, config.tamanho_lote)
    estado = EstadoLagrangiano.inicial(K, config.mu, config.lambda_max)
    log = [_registro_epoca(modelo, dados, estado, 0, [0] * K)]
    if config.epocas == 0:
        return modelo, estado, log

    rng = np.random.default_rng([config.semente, 2])
    perda = PerdaLagrangiana(estado, irrestrita=config.perda_irrestrita)
    nb = modelo.num_parametros_backbone()
    params = modelo.parametros()
    if config.adaptativo:
        otim_cabeca, otim_backbone = OtimizadorAdam(params[nb:]), OtimizadorAdam(params[:nb])
    else:
        otim_cabeca, otim_backbone = OtimizadorSGD(), OtimizadorSGD()
    acumulado = [np.zeros_like(p) for p in params[:nb]]

    taxa_min, taxa_max = config.taxa_min, config.taxa_max
    fator, epoca_decaimento = config.decaimento
    checkpoint = modelo.copiar()

    for epoca in range(1, config.epocas + 1):
        if epoca_decaimento and epoca == epoca_decaimento + 1:
            taxa_min *= fator
            taxa_max *= fator
        ausencias = np.zeros(K, dtype=np.int64)

        for idx in _lotes(dados.n, config.tamanho_lote, rng):
            try:
                _, grad, extras = backward(modelo, dados.subconjunto(idx), perda, detalhes=True)
            except ErroNumerico as e:
                raise ErroNumerico(f"Treino abortado na época {epoca}", termo=e.termo, checkpoint=checkpoint) from e

            grad_phis = extras["grad_phis"]
            grad_lambdas = extras["grad_lambdas"]
            otim_cabeca.passo(params[nb:], grad.partes[nb:], taxa_min)
            for a, g in zip(acumulado, grad.partes[:nb]):
                a += g
            estado.phis -= taxa_min * grad_phis
            if config.ascensao_lambda:
                estado.lambdas += taxa_max * grad_lambdas
            estado.projetar()
            ausencias += extras["ausencias"]

        if nb and epoca % config.intervalo_backbone == 0:
            otim_backbone.passo(params[:nb], acumulado, taxa_min)
            for a in acumulado:
                a.fill(0.0)

        try:
            registro = _registro_epoca(modelo, dados, estado, epoca, ausencias)
        except ErroNumerico as e:
            raise ErroNumerico(str(e), termo=e.termo, checkpoint=checkpoint) from e
        log.append(registro)
        checkpoint = modelo.copiar()

        if ausencias.any():
            logger.warning("Época %d: termos de minibatch sem exemplos por classe %s", epoca, ausencias.tolist())
        logger.debug("μ=%g %r", config.mu, registro)

    return modelo, estado, log


def treinar_dg(dados: ConjuntoRotulado, espec: EspecBackbone, config_dg: ConfigDG, config: ConfigTreino) -> ModeloSeletivo:
    """
    Baseline Deep Gamblers: rede com K+1 saídas, entropia cruzada nas épocas de
    aquecimento e depois a perda DG, ambas por SGD com `taxa_aquecimento`.
    """
    _checar_entrada(dados, espec)
    K = dados.num_classes
    config_dg.validar(K)
    modelo = ModeloSeletivo.inicializar(espec, K, config.semente, saidas_extras=1)
    rng = np.random.default_rng([config.semente, 3])
    _descer(modelo, dados, EntropiaCruzada(), config.epocas_aquecimento, config.taxa_aquecimento, rng, config.tamanho_lote)
    _descer(modelo, dados, PerdaDG(config_dg.payoff, K), config.epocas, config.taxa_aquecimento, rng, config.tamanho_lote)
    logger.info("Deep Gamblers treinado com o=%g", config_dg.payoff)
    return modelo
