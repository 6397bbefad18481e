import pytest

from app.controllers.pipeline import CODIGO_ENTRADA
from app.database.repositorios import exportar_csv, ingerir_csv
from app.models.configuracao import EspecSintetico
from app.utils.erros import ErroEntrada, ErroLeitura
from app.utils.sinteticos import sintetizar

import main


def _escrever(caminho, texto):
    with open(caminho, "w", encoding="utf-8") as f:
        f.write(texto)
    return str(caminho)


def _escrever_bytes(caminho, conteudo: bytes):
    with open(caminho, "wb") as f:
        f.write(conteudo)
    return str(caminho)


def test_ingerir_csv(tmp_path):
    caminho = _escrever(tmp_path / "d.csv", "f0,f1,label\n0.5,1.0,0\n-2,3e-1,2\n0,0,1\n")
    dados = ingerir_csv(caminho)
    assert (dados.n, dados.dim, dados.num_classes) == (3, 2, 3)
    assert dados.X[1].tolist() == [-2.0, 0.3]


def test_rotulo_negativo_aponta_a_linha(tmp_path):
    caminho = _escrever(tmp_path / "d.csv", "f0,label\n0.1,0\n0.2,-1\n")
    with pytest.raises(ErroLeitura) as info:
        ingerir_csv(caminho)
    assert info.value.linha == 3


def test_feature_nao_numerica(tmp_path):
    caminho = _escrever(tmp_path / "d.csv", "f0,label\nabc,0\n")
    with pytest.raises(ErroLeitura) as info:
        ingerir_csv(caminho)
    assert info.value.linha == 2


def test_cabecalho_invalido(tmp_path):
    caminho = _escrever(tmp_path / "d.csv", "x,y\n0.1,0\n")
    with pytest.raises(ErroLeitura) as info:
        ingerir_csv(caminho)
    assert info.value.linha == 1


@pytest.mark.parametrize("texto", ["", "f0,label\n"])
def test_arquivo_sem_dados(tmp_path, texto):
    with pytest.raises(ErroEntrada):
        ingerir_csv(_escrever(tmp_path / "d.csv", texto))


def test_arquivo_inexistente(tmp_path):
    with pytest.raises(ErroEntrada):
        ingerir_csv(str(tmp_path / "nada.csv"))


def test_exportar_e_reler(tmp_path):
    dados = sintetizar(EspecSintetico(tipo="mistura_gaussiana", n=40, semente=3))
    copia = ingerir_csv(exportar_csv(dados, str(tmp_path / "sub" / "m.csv")))
    assert copia == dados


def test_utf8_invalido_aponta_a_linha(tmp_path):
    caminho = _escrever_bytes(tmp_path / "d.csv", b"f0,label\n\xff\xfe,0\n")
    with pytest.raises(ErroLeitura) as info:
        ingerir_csv(caminho)
    assert info.value.linha == 2
    assert "0xff" in str(info.value)


def test_utf8_invalido_no_cabecalho(tmp_path):
    caminho = _escrever_bytes(tmp_path / "d.csv", b"f0,lab\xc3el\n0.1,0\n")
    with pytest.raises(ErroLeitura) as info:
        ingerir_csv(caminho)
    assert info.value.linha == 1


def test_quebras_de_linha_crlf(tmp_path):
    caminho = _escrever_bytes(tmp_path / "d.csv", "f0,label\r\n0.5,1\r\n1.5,0\r\n".encode("utf-8"))
    dados = ingerir_csv(caminho)
    assert dados.n == 2
    assert dados.y.tolist() == [1, 0]


def test_main_com_csv_nao_utf8_sai_com_codigo_de_entrada(tmp_path):
    caminho = _escrever_bytes(tmp_path / "d.csv", b"f0,label\n0.1,0\n\xff\xfe,1\n")
    codigo = main.main(["oracle", "--dados", caminho, "--saida", str(tmp_path / "o"), "--eps", "0.1", "--tipo-oraculo", "osp"])
    assert codigo == CODIGO_ENTRADA
    assert (tmp_path / "o" / "erro.json").exists()
