import json
import os

import numpy as np
import pytest

from app.controllers.oraculo import cobertura_bayes_mistura
from app.controllers.pipeline import (
    CODIGO_ENTRADA,
    CODIGO_INVIAVEL,
    CODIGO_NUMERICO,
    CODIGO_OK,
    ControlePipeline,
)
from app.database.repositorios import exportar_csv, ingerir_csv
from app.models.configuracao import (
    ConfigDG,
    ConfigExecucao,
    ConfigTreino,
    EspecSintetico,
    grade_limiares,
    grade_mus_completa,
    grade_mus_mesa,
)
from app.models.rede import EspecBackbone, ModeloSeletivo
from app.utils.erros import ErroEntrada, ErroNumerico
from app.utils.sinteticos import eta_mistura, sintetizar

import main


def _escrever(caminho, texto):
    with open(caminho, "w", encoding="utf-8") as f:
        f.write(texto)
    return str(caminho)


# --- dados sintéticos ---


def test_sintetico_deterministico():
    espec = EspecSintetico(tipo="blobs_separaveis", n=50, semente=8, num_classes=3)
    assert sintetizar(espec) == sintetizar(espec)
    assert sintetizar(espec).num_classes == 3


def test_mistura_k3_exige_medias():
    with pytest.raises(ErroEntrada):
        EspecSintetico(tipo="mistura_gaussiana", num_classes=3)


def test_eta_da_mistura_e_distribuicao():
    espec = EspecSintetico(tipo="mistura_gaussiana")
    eta = eta_mistura(espec, [[-1.0, -1.0], [0.0, 0.0], [1.0, 1.0]])
    np.testing.assert_allclose(eta.sum(axis=1), 1.0)
    assert eta[0, 0] > 0.5 and eta[2, 1] > 0.5
    assert eta[1, 0] == pytest.approx(0.5)


def test_covariancia_invalida():
    with pytest.raises(ErroEntrada):
        EspecSintetico(tipo="mistura_gaussiana", covariancias=[[[1.0, 2.0], [2.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]])


# --- configuração ---


def test_grade_de_mu_vazia():
    with pytest.raises(ErroEntrada):
        ConfigExecucao(mus=())


def test_campo_desconhecido():
    with pytest.raises(ErroEntrada):
        ConfigExecucao.from_dict({"taxa": 0.1})


@pytest.mark.parametrize(
    "dados",
    [
        {"treino": {"epochs": 3}},
        {"criterio": {"modo": "erro", "epsilon": 0.1}},
        {"fonte": {"sintetico": {"tipo": "blobs_separaveis", "amostras": 10}}},
        {"treino": [1, 2]},
    ],
)
def test_campo_aninhado_desconhecido(dados):
    with pytest.raises(ErroEntrada):
        ConfigExecucao.from_dict(dados)


def test_decaimento_mal_formado():
    with pytest.raises(ErroEntrada):
        ConfigTreino(decaimento=0.1)


def test_grade_nao_numerica():
    with pytest.raises(ErroEntrada):
        ConfigExecucao(mus=("a", "b"))


def test_config_dg_so_tem_payoff():
    assert ConfigDG().to_dict() == {"payoff": 1.5}
    with pytest.raises(ErroEntrada):
        ConfigDG(payoff=3.0).validar(3)


def test_hash_ignora_saida_e_trabalhadores():
    a = ConfigExecucao(saida="x", trabalhadores=1)
    b = ConfigExecucao(saida="y", trabalhadores=4)
    assert a.hash_config() == b.hash_config()
    assert ConfigExecucao(semente=1).hash_config() != a.hash_config()


def test_grades_de_mu():
    completa = grade_mus_completa()
    assert len(completa) == 30 and completa[0] == pytest.approx(0.01) and completa[-1] == pytest.approx(16.0)
    assert list(completa) == sorted(set(completa))
    mesa = grade_mus_mesa()
    assert len(mesa) == 8 and mesa[0] == pytest.approx(0.05) and mesa[-1] == pytest.approx(16.0)


def test_config_ida_e_volta():
    config = ConfigExecucao(mus=(0.5, 2.0), alvos_curva=(0.02, 0.01))
    assert config.alvos_curva == (0.01, 0.02)
    assert ConfigExecucao.from_dict(config.to_dict()).hash_config() == config.hash_config()


# --- pipeline ---


def _config(saida, **extras):
    base = dict(
        semente=0,
        semente_divisao=7,
        fonte={"sintetico": EspecSintetico(tipo="blobs_separaveis", n=150, semente=1).to_dict()},
        ocultas=(4,),
        ativacao="tanh",
        treino=ConfigTreino(epocas=3, epocas_aquecimento=5, tamanho_lote=64, taxa_aquecimento=0.05),
        mus=(0.5, 2.0),
        limiares=tuple(np.linspace(0.0, 1.0, 11).tolist()),
        alvos_curva=(0.01, 0.05),
        payoffs_dg=(1.5,),
        saida=str(saida),
    )
    base.update(extras)
    return ConfigExecucao(**base)


def test_pipeline_completo(tmp_path):
    sistema = ControlePipeline(_config(tmp_path))
    resultado = sistema.executar()
    assert resultado["sucesso"]
    assert resultado["codigo"] in (CODIGO_OK, CODIGO_INVIAVEL)
    for nome in (
        "config.json",
        "modelos/modelo_mu_0.json",
        "modelos/modelo_mu_1.json",
        "modelos/modelo_sr.json",
        "modelos/modelo_dg_0.json",
        "logs/treino_mu_0.json",
        "grade.csv",
        "metricas.json",
        "curva.csv",
        "sobreposicao.csv",
        "consistencia.json",
    ):
        assert os.path.exists(tmp_path / nome), nome

    with open(tmp_path / "metricas.json", encoding="utf-8") as f:
        metricas = json.load(f)
    assert metricas["hash_config"] == sistema.hash
    assert metricas["mu"] in (0.5, 2.0)
    assert set(metricas["baselines"]) == {"sr", "dg"}
    assert len(sistema.repo.carregar_log_treino(0)) == 4
    assert len(resultado["pontos"]) == 3 * 2


def test_pipeline_reprodutivel(tmp_path):
    for pasta in ("a", "b"):
        assert ControlePipeline(_config(tmp_path / pasta, alvos_curva=())).executar()["sucesso"]
    with open(tmp_path / "a" / "metricas.json", "rb") as f, open(tmp_path / "b" / "metricas.json", "rb") as g:
        assert f.read() == g.read()


def test_pipeline_exemplo_analitico(tmp_path):
    config = _config(
        tmp_path,
        fonte={"sintetico": EspecSintetico(tipo="exemplo_analitico", n=300, semente=5).to_dict()},
        alvos_curva=(0.1,),
    )
    resultado = ControlePipeline(config).executar()
    assert resultado["sucesso"]
    assert resultado["codigo"] in (CODIGO_OK, CODIGO_INVIAVEL)
    with open(tmp_path / "metricas.json", encoding="utf-8") as f:
        metricas = json.load(f)
    assert 0.0 <= metricas["cobertura"] <= 1.0
    assert os.path.exists(tmp_path / "modelos" / "modelo_dg_0.json")


@pytest.mark.lento
def test_mistura_gaussiana_reprodutivel(tmp_path):
    fonte = {"sintetico": EspecSintetico(tipo="mistura_gaussiana", n=1500, semente=2).to_dict()}
    for pasta in ("a", "b"):
        config = _config(tmp_path / pasta, fonte=fonte, alvos_curva=(0.02, 0.05), payoffs_dg=())
        assert ControlePipeline(config).executar()["sucesso"]
    for nome in ("metricas.json", "grade.csv", "curva.csv", "modelos/modelo_mu_0.json"):
        with open(tmp_path / "a" / nome, "rb") as f, open(tmp_path / "b" / nome, "rb") as g:
            assert f.read() == g.read(), nome


def test_selecionar_sem_treino(tmp_path):
    sistema = ControlePipeline(_config(tmp_path))
    resultado = sistema.selecionar()
    assert not resultado["sucesso"]
    assert resultado["codigo"] == CODIGO_ENTRADA
    with open(tmp_path / "erro.json", encoding="utf-8") as f:
        erro = json.load(f)
    assert erro["etapa"] == "selecao"
    assert erro["hash_config"] == sistema.hash


def test_erro_numerico_salva_checkpoint(tmp_path):
    sistema = ControlePipeline(_config(tmp_path))
    checkpoint = ModeloSeletivo.inicializar(EspecBackbone((2, 4), "tanh"), 2, semente=0)

    def explodir():
        raise ErroNumerico("Perda não finita", termo="lagrangiana", checkpoint=checkpoint)

    resultado = sistema._executar("treino", explodir)
    assert resultado["codigo"] == CODIGO_NUMERICO
    assert sistema.repo.existe_modelo("checkpoint")


@pytest.mark.lento
def test_mistura_gaussiana_ponta_a_ponta(tmp_path):
    espec = EspecSintetico(tipo="mistura_gaussiana", n=4000)
    referencia = cobertura_bayes_mistura(espec, 0.02)
    medidas = []
    for semente in range(3):
        config = _config(
            tmp_path / str(semente),
            semente=semente,
            fonte={"sintetico": EspecSintetico(tipo="mistura_gaussiana", n=4000, semente=semente).to_dict()},
            ocultas=(16,),
            treino=ConfigTreino(epocas=20, epocas_aquecimento=100, tamanho_lote=128, taxa_aquecimento=0.05, taxa_min=1e-2, taxa_max=1e-3, decaimento=(0.1, 10), intervalo_backbone=5),
            mus=(0.25, 1.0, 4.0),
            limiares=grade_limiares(),
            alvos_curva=(),
            payoffs_dg=(),
        )
        resultado = ControlePipeline(config).executar()
        assert resultado["sucesso"]
        m = resultado["metricas"]
        medidas.append((m["validacao"]["erro_validacao"], m["erro"], m["cobertura"]))

    erro_val, erro_teste, cobertura = np.median(np.array(medidas), axis=0)
    assert erro_val <= 0.02
    assert erro_teste <= 0.03
    assert cobertura >= 0.85 * referencia


def test_oraculo_sobre_csv(tmp_path):
    dados = sintetizar(EspecSintetico(tipo="exemplo_analitico", n=40, semente=2))
    caminho = exportar_csv(dados, str(tmp_path / "a.csv"))
    config = _config(tmp_path / "saida", fonte={"csv": caminho})
    resultado = ControlePipeline(config).rodar_oraculo("limiares", 0.1, modo="desacoplado", grade_alfa="criticos")
    assert resultado["sucesso"]
    assert os.path.exists(tmp_path / "saida" / "oraculo_desacoplado.json")


def test_oraculo_modo_desconhecido(tmp_path):
    resultado = ControlePipeline(_config(tmp_path)).rodar_oraculo("limiares", 0.1, modo="aproximado")
    assert resultado["codigo"] == CODIGO_ENTRADA


# --- linha de comando ---


def test_main_synth(tmp_path):
    destino = str(tmp_path / "s.csv")
    assert main.main(["synth", "exemplo_analitico", destino, "--n", "30", "--semente", "4"]) == 0
    assert ingerir_csv(destino).n == 30


def test_main_config_inexistente(tmp_path):
    assert main.main(["train", "--config", str(tmp_path / "nao.json")]) == CODIGO_ENTRADA


def test_main_flags_sobrepoem_arquivo(tmp_path):
    caminho = _escrever(tmp_path / "c.json", json.dumps({"semente": 3, "mus": [1.0], "hash_config": "velho"}))
    args = main.criar_parser().parse_args(["select", "--config", caminho, "--semente", "9", "--alvo", "0.05"])
    config = main.montar_config(args)
    assert config.semente == 9
    assert config.mus == (1.0,)
    assert config.criterio.alvo == 0.05


def test_main_oraculo(tmp_path):
    dados = exportar_csv(sintetizar(EspecSintetico(tipo="exemplo_analitico", n=20, semente=0)), str(tmp_path / "d.csv"))
    codigo = main.main(["oracle", "--dados", dados, "--saida", str(tmp_path / "o"), "--eps", "0.1", "--tipo-oraculo", "osp"])
    assert codigo == CODIGO_OK
    assert os.path.exists(tmp_path / "o" / "oraculo_osp.json")


@pytest.mark.parametrize("conteudo", [{"treino": {"epochs": 3}}, [1, 2, 3]])
def test_main_config_com_campo_errado(tmp_path, conteudo):
    caminho = _escrever(tmp_path / "c.json", json.dumps(conteudo))
    assert main.main(["train", "--config", caminho]) == CODIGO_ENTRADA
