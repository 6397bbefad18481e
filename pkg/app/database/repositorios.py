import csv
import io
import logging
import math
import os

import numpy as np

from app.database.conexao import DiretorioExecucao
from app.models.dados import ConjuntoRotulado
from app.models.rede import ModeloSeletivo
from app.models.registro import RegistroEpoca
from app.utils.erros import ErroEntrada, ErroLeitura
from app.utils.validadores import ValidadorCsv

logger = logging.getLogger(__name__)

COLUNAS_GRADE = ("t", "cobertura", "erro")
COLUNAS_CURVA = ("metodo", "alvo", "erro", "cobertura", "parametro", "t", "viavel")
COLUNAS_SOBREPOSICAO = ("alvo", "mu", "t", "sobreposicao")


def ingerir_csv(caminho: str) -> ConjuntoRotulado:
    """
    Lê `f0,...,f{d-1},label` (UTF-8, floats decimais, rótulos inteiros).
    K é inferido como max(label) + 1.
    """
    if not os.path.exists(caminho):
        raise ErroEntrada(f"Arquivo não encontrado: {caminho}")

    with open(caminho, "rb") as f:
        bruto = f.read()
    try:
        texto = bruto.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ErroLeitura(f"byte 0x{bruto[e.start]:02x} não é UTF-8 válido", bruto[: e.start].count(b"\n") + 1) from e

    leitor = csv.reader(io.StringIO(texto, newline=""))
    cabecalho = next(leitor, None)
    if cabecalho is None:
        raise ErroEntrada(f"Arquivo vazio: {caminho}")
    try:
        dim = ValidadorCsv.validar_cabecalho(cabecalho)
    except ErroEntrada as e:
        raise ErroLeitura(str(e), 1) from e

    linhas, rotulos = [], []
    for numero, campos in enumerate(leitor, start=2):
        if not campos or all(not ValidadorCsv.limpar(c) for c in campos):
            continue
        if len(campos) != dim + 1:
            raise ErroLeitura(f"esperados {dim + 1} campos, encontrados {len(campos)}", numero)
        try:
            valores = [float(ValidadorCsv.limpar(c)) for c in campos[:-1]]
        except ValueError:
            raise ErroLeitura("feature não numérica", numero)
        if not all(math.isfinite(v) for v in valores):
            raise ErroLeitura("feature não finita", numero)
        try:
            rotulos.append(ValidadorCsv.validar_rotulo(campos[-1]))
        except ValueError as e:
            raise ErroLeitura(str(e), numero)
        linhas.append(valores)

    if not linhas:
        raise ErroEntrada(f"Arquivo sem dados (só o cabeçalho): {caminho}")
    dados = ConjuntoRotulado(np.array(linhas, dtype=np.float64).reshape(-1, dim), rotulos)
    logger.info("Lido %s: %r", caminho, dados)
    return dados


def exportar_csv(dados: ConjuntoRotulado, caminho: str) -> str:
    """Inverso de `ingerir_csv`. Floats escritos com repr, então a releitura é exata."""
    pasta = os.path.dirname(caminho)
    if pasta and not os.path.exists(pasta):
        os.makedirs(pasta)
    with open(caminho, "w", newline="", encoding="utf-8") as f:
        escritor = csv.writer(f)
        escritor.writerow([f"f{i}" for i in range(dados.dim)] + ["label"])
        for x, r in zip(dados.X, dados.y):
            escritor.writerow([repr(float(v)) for v in x] + [int(r)])
    return caminho


class RepositorioExecucao:
    def __init__(self, raiz: str, hash_config: str, semente: int):
        """
        Artefatos de uma execução. Todo JSON gravado leva hash_config e semente.
        """
        self.dir = DiretorioExecucao(raiz)
        self.hash_config = hash_config
        self.semente = semente

    def _carimbar(self, dados: dict) -> dict:
        return {**dados, "hash_config": self.hash_config, "semente": self.semente}

    def salvar_config(self, config) -> str:
        return self.dir.salvar_json("config.json", self._carimbar(config.to_dict()))

    def salvar_modelo(self, nome: str, modelo: ModeloSeletivo) -> str:
        return self.dir.salvar_json(f"modelos/{nome}.json", self._carimbar(modelo.to_dict()))

    def carregar_modelo(self, nome: str) -> ModeloSeletivo:
        return ModeloSeletivo.from_dict(self.dir.ler_json(f"modelos/{nome}.json"))

    def existe_modelo(self, nome: str) -> bool:
        return self.dir.existe(f"modelos/{nome}.json")

    def salvar_log_treino(self, indice: int, mu: float, log) -> str:
        return self.dir.salvar_json(
            f"logs/treino_mu_{indice}.json",
            self._carimbar({"mu": mu, "epocas": [r.to_dict() for r in log]}),
        )

    def carregar_log_treino(self, indice: int):
        dados = self.dir.ler_json(f"logs/treino_mu_{indice}.json")
        return [RegistroEpoca.from_dict(r) for r in dados["epocas"]]

    def salvar_grade(self, grade, nome: str = "grade.csv") -> str:
        colunas = (grade.nome_parametro,) + COLUNAS_GRADE
        return self.dir.salvar_csv(nome, grade.linhas(), colunas)

    def salvar_metricas(self, metricas: dict) -> str:
        return self.dir.salvar_json("metricas.json", self._carimbar(metricas))

    def salvar_curva(self, pontos) -> str:
        return self.dir.salvar_csv("curva.csv", [p.to_dict() for p in pontos], COLUNAS_CURVA)

    def salvar_sobreposicao(self, linhas) -> str:
        return self.dir.salvar_csv("sobreposicao.csv", linhas, COLUNAS_SOBREPOSICAO)

    def salvar_relatorio(self, nome: str, dados: dict) -> str:
        return self.dir.salvar_json(nome, self._carimbar(dados))

    def salvar_erro(self, etapa: str, erro: Exception) -> str:
        """Manifesto de erro: etapa, tipo, mensagem e hash da configuração."""
        return self.dir.salvar_json(
            "erro.json",
            self._carimbar({"etapa": etapa, "tipo": type(erro).__name__, "mensagem": str(erro)}),
        )
