from collections import Counter

import numpy as np
import pytest

from app.controllers.treino import (
    OtimizadorAdam,
    OtimizadorSGD,
    aquecer,
    lagrangiana,
    perda_dg,
    perda_restricao,
    perda_restrita,
    treinar_dg,
    treinar_sgda,
)
from app.models.configuracao import ConfigDG, ConfigTreino
from app.models.dados import ConjuntoRotulado
from app.models.perdas import EstadoLagrangiano, PerdaEscalar, PerdaLagrangiana, PerdaRestrita
from app.models.rede import EspecBackbone, ModeloSeletivo, backward
from app.utils.erros import ErroEntrada

from conftest import entrada_de_scores, modelo_de_scores


def test_perda_restrita_a_mao():
    modelo = modelo_de_scores(2)
    lote = ConjuntoRotulado(entrada_de_scores([[0.8, 0.2], [0.4, 0.6], [0.5, 0.5]]), [0, 1, 0], num_classes=2)
    assert perda_restrita(modelo, lote, 0) == pytest.approx(-(np.log(0.8) + np.log(0.5)) / 2)
    assert perda_restricao(modelo, lote, 0) == pytest.approx(-np.log(0.6))


def test_classe_ausente_no_lote_conta_e_vale_zero():
    modelo = modelo_de_scores(3)
    lote = ConjuntoRotulado(entrada_de_scores([[0.5, 0.3, 0.2]]), [1], num_classes=3)
    contador = Counter()
    assert perda_restrita(modelo, lote, 0, contador) == 0.0
    assert perda_restricao(modelo, lote, 1, contador) == 0.0
    assert contador == {"restrita_0": 1, "restricao_1": 1}


def test_lagrangiana_com_lambdas_nulos_e_soma_das_restritas():
    modelo = modelo_de_scores(2)
    lote = ConjuntoRotulado(entrada_de_scores([[0.7, 0.3], [0.1, 0.9]]), [0, 1], num_classes=2)
    estado = EstadoLagrangiano.inicial(2, mu=1.0)
    esperado = -np.log(0.7) - np.log(0.9)
    assert lagrangiana(modelo, lote, estado) == pytest.approx(esperado)


def test_lagrangiana_termo_de_folga():
    modelo = modelo_de_scores(2)
    lote = ConjuntoRotulado(entrada_de_scores([[0.7, 0.3], [0.1, 0.9]]), [0, 1], num_classes=2)
    base = lagrangiana(modelo, lote, EstadoLagrangiano.inicial(2, mu=2.0))
    estado = EstadoLagrangiano([0.0, 0.0], [0.5, 0.0], mu=2.0)
    assert lagrangiana(modelo, lote, estado) == pytest.approx(base + 2.0 * 0.5)


def test_perda_dg_a_mao():
    modelo = modelo_de_scores(2, saidas_extras=1)
    lote = ConjuntoRotulado(entrada_de_scores([[0.5, 0.2, 0.3]]), [1], num_classes=2)
    assert perda_dg(modelo, lote, ConfigDG(payoff=1.5)) == pytest.approx(-np.log(0.2 + 0.3 / 1.5))


def test_payoff_fora_do_intervalo():
    modelo = modelo_de_scores(2, saidas_extras=1)
    lote = ConjuntoRotulado(entrada_de_scores([[0.5, 0.2, 0.3]]), [1], num_classes=2)
    with pytest.raises(ErroEntrada):
        perda_dg(modelo, lote, ConfigDG(payoff=2.0))


def test_probabilidade_zero_e_recortada():
    P = np.array([[1.0, 0.0]])
    assert np.isfinite(PerdaRestrita(1).valor(P, None, np.array([1])))


def test_projecao():
    estado = EstadoLagrangiano([3.0, 0.5], [0.2, 0.0], mu=0.1)
    estado.lambdas -= np.array([0.0, 2.0])
    estado.phis -= np.array([0.5, 0.0])
    estado.projetar()
    assert estado.lambdas.tolist() == [pytest.approx(1.0), 0.0]
    assert estado.phis.tolist() == [0.0, 0.0]


def test_estado_invalido():
    with pytest.raises(ErroEntrada):
        EstadoLagrangiano([0.0], [0.0, 0.0], mu=1.0)
    with pytest.raises(ErroEntrada):
        EstadoLagrangiano([0.0], [0.0], mu=-1.0)


# --- otimizadores ---


def test_sgd_passo():
    p = np.array([1.0, 2.0])
    OtimizadorSGD().passo([p], [np.array([1.0, -1.0])], 0.5)
    assert p.tolist() == [0.5, 2.5]


def test_adam_desce_quadratica():
    p = np.array([3.0, -2.0])
    otimizador = OtimizadorAdam([p])
    for _ in range(500):
        otimizador.passo([p], [2.0 * p], 0.05)
    assert np.linalg.norm(p) < 0.1


# --- treino ---


def _config(**extras):
    base = dict(
        mu=1.0,
        epocas=3,
        tamanho_lote=32,
        taxa_min=1e-2,
        taxa_max=1e-2,
        decaimento=(0.1, 2),
        intervalo_backbone=1,
        semente=0,
        epocas_aquecimento=2,
        taxa_aquecimento=1e-2,
    )
    base.update(extras)
    return ConfigTreino(**base)


ESPEC = EspecBackbone((2, 6), "tanh")


def test_aquecer_sem_epocas_devolve_inicializacao(blobs):
    modelo = aquecer(blobs, ESPEC, 3, epocas=0, taxa=0.1, semente=9)
    inicial = ModeloSeletivo.inicializar(ESPEC, 3, 9)
    assert np.array_equal(modelo.W_cabeca, inicial.W_cabeca)


def test_aquecimento_separa_blobs(blobs):
    modelo = aquecer(blobs, EspecBackbone.padrao(2, ocultas=()), 3, epocas=200, taxa=0.1, semente=0, tamanho_lote=120)
    acerto = np.mean(np.argmax(modelo.scores_classes(blobs.X), axis=1) == blobs.y)
    assert acerto >= 0.99


def test_sgda_log_e_limites(blobs):
    modelo, estado, log = treinar_sgda(blobs, ESPEC, _config())
    assert [r.epoca for r in log] == [0, 1, 2, 3]
    assert log[0].lambdas == [0.0, 0.0, 0.0]
    assert all(0.0 <= v <= estado.lambda_max for r in log for v in r.lambdas)
    assert all(v >= 0.0 for r in log for v in r.phis)
    assert modelo.num_classes == 3


def test_sgda_deterministico(blobs):
    a = treinar_sgda(blobs, ESPEC, _config())
    b = treinar_sgda(blobs, ESPEC, _config())
    for p, q in zip(a[0].parametros(), b[0].parametros()):
        assert np.array_equal(p, q)
    assert a[1].lambdas.tolist() == b[1].lambdas.tolist()


def test_sgda_sem_epocas(blobs):
    modelo, estado, log = treinar_sgda(blobs, ESPEC, _config(epocas=0))
    assert len(log) == 1
    inicial = aquecer(blobs, ESPEC, 3, 2, 1e-2, 0, 32)
    assert np.array_equal(modelo.W_cabeca, inicial.W_cabeca)


def test_sem_subida_lambda_fica_zero(blobs):
    _, estado, log = treinar_sgda(blobs, ESPEC, _config(ascensao_lambda=False))
    assert estado.lambdas.tolist() == [0.0, 0.0, 0.0]
    assert all(r.lambdas == [0.0, 0.0, 0.0] for r in log)


def test_lambda_max_padrao(blobs):
    _, estado, _ = treinar_sgda(blobs, ESPEC, _config(mu=0.5, epocas=1))
    assert estado.lambda_max == pytest.approx(5.0)


def test_dimensao_errada(blobs):
    with pytest.raises(ErroEntrada):
        treinar_sgda(blobs, EspecBackbone((3, 4), "tanh"), _config())


def test_dg_tem_saida_de_abstencao(blobs):
    modelo = treinar_dg(blobs, ESPEC, ConfigDG(payoff=2.0), _config(epocas=2))
    assert modelo.saidas_extras == 1
    assert modelo.forward(blobs.X).shape == (blobs.n, 4)


def test_adam_no_sgda(blobs):
    modelo, _, log = treinar_sgda(blobs, ESPEC, _config(adaptativo=True))
    assert len(log) == 4
    assert all(np.isfinite(p).all() for p in modelo.parametros())


def test_sgda_reduz_soma_das_restricoes(blobs):
    config = _config(epocas=20, taxa_min=0.05, taxa_max=0.01, decaimento=(1.0, 0))
    _, _, log = treinar_sgda(blobs, ESPEC, config)
    assert log[-1].soma_restricoes < log[0].soma_restricoes


class SomaRestritas(PerdaEscalar):
    """Σ_k L̃_k^res sem termo de restrição."""

    nome = "soma_restritas"

    def __init__(self, num_classes):
        self.num_classes = num_classes

    def avaliar(self, P, Z, y):
        partes = [PerdaRestrita(k).avaliar(P, Z, y) for k in range(self.num_classes)]
        gP = np.zeros_like(P)
        for parte in partes:
            gP += parte[1]
        return sum(parte[0] for parte in partes), gP, None, {}


def test_mu_zero_e_aquecimento_mais_minimizacao_simples(blobs):
    config = _config(mu=0.0, epocas=4, tamanho_lote=blobs.n, taxa_min=0.05, decaimento=(1.0, 0))
    modelo, estado, _ = treinar_sgda(blobs, ESPEC, config)
    assert estado.lambdas.tolist() == [0.0, 0.0, 0.0]
    assert estado.phis.tolist() == [0.0, 0.0, 0.0]

    referencia = aquecer(blobs, ESPEC, 3, config.epocas_aquecimento, config.taxa_aquecimento, config.semente, blobs.n)
    for _ in range(config.epocas):
        _, grad = backward(referencia, blobs, SomaRestritas(3))
        OtimizadorSGD().passo(referencia.parametros(), grad.partes, config.taxa_min)
    for p, q in zip(modelo.parametros(), referencia.parametros()):
        np.testing.assert_allclose(p, q, rtol=1e-12, atol=1e-14)


def test_lote_cheio_nao_depende_da_ordem(blobs):
    config = _config(epocas=4, tamanho_lote=blobs.n)
    ordem = np.random.default_rng(5).permutation(blobs.n)
    embaralhado = ConjuntoRotulado(blobs.X[ordem], blobs.y[ordem], num_classes=3)
    a, estado_a, _ = treinar_sgda(blobs, ESPEC, config)
    b, estado_b, _ = treinar_sgda(embaralhado, ESPEC, config)
    for p, q in zip(a.parametros(), b.parametros()):
        np.testing.assert_allclose(p, q, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(estado_a.lambdas, estado_b.lambdas, rtol=1e-9, atol=1e-12)


def test_backbone_parado_entre_intervalos(blobs):
    inicial = aquecer(blobs, ESPEC, 3, 2, 1e-2, 0, 32)

    antes, _, _ = treinar_sgda(blobs, ESPEC, _config(epocas=2, intervalo_backbone=3))
    assert np.array_equal(antes.pesos[0], inicial.pesos[0])
    assert np.array_equal(antes.vieses[0], inicial.vieses[0])
    assert not np.array_equal(antes.W_cabeca, inicial.W_cabeca)

    depois, _, _ = treinar_sgda(blobs, ESPEC, _config(epocas=3, intervalo_backbone=3))
    assert not np.array_equal(depois.pesos[0], inicial.pesos[0])


@pytest.mark.parametrize("mu", [0.3, 1.0, 4.0])
def test_objetivo_nao_depende_de_phi_com_lambda_igual_a_mu(modelo_tanh, mu):
    rng = np.random.default_rng(2)
    lote = ConjuntoRotulado(rng.normal(size=(15, 2)), np.arange(15) % 3, num_classes=3)
    P = modelo_tanh.passo_forward(lote.X)[3]
    valores = []
    for phis in ([0.0, 0.0, 0.0], [0.5, 0.1, 2.0], [3.0, 3.0, 3.0]):
        perda = PerdaLagrangiana(EstadoLagrangiano([mu] * 3, phis, mu=mu))
        valor, _, _, extras = perda.avaliar(P, None, lote.y)
        np.testing.assert_array_equal(extras["grad_phis"], 0.0)
        valores.append(valor)
    assert valores[1] == pytest.approx(valores[0], rel=1e-12)
    assert valores[2] == pytest.approx(valores[0], rel=1e-12)
