"""
Orquestração de uma execução: divisão → aquecimento → treino na grade de μ →
seleção → avaliação no teste, com baselines SR/DG, curvas e oráculo.

Cada etapa pública devolve um dicionário {"sucesso", "mensagem", "codigo", ...}.
"""
import logging
from concurrent.futures import ProcessPoolExecutor

from app.controllers import oraculo
from app.controllers.avaliacao import (
    Receita,
    checar_consistencia,
    curva_cobertura_erro,
    sobreposicao_osp,
    tabela_sobreposicao,
)
from app.controllers.selecao import dividir_dados
from app.controllers.treino import aquecer, treinar_dg, treinar_sgda
from app.database.repositorios import RepositorioExecucao, ingerir_csv
from app.models.configuracao import ConfigDG, ConfigExecucao, ConfigTreino, EspecSintetico
from app.models.decisao import avaliar as avaliar_familia
from app.models.rede import EspecBackbone
from app.utils.erros import ErroEntrada, ErroNumerico
from app.utils.sinteticos import sintetizar

logger = logging.getLogger(__name__)

CODIGO_OK, CODIGO_ENTRADA, CODIGO_NUMERICO, CODIGO_INVIAVEL = 0, 1, 2, 3


def carregar_dados(config: ConfigExecucao):
    if "csv" in config.fonte:
        return ingerir_csv(config.fonte["csv"])
    return sintetizar(EspecSintetico.from_dict(config.fonte["sintetico"]))


def _treinar_mu(argumentos):
    """Unidade de trabalho de um μ (função de módulo para poder ir a outro processo)."""
    treino, espec, config_treino = argumentos
    modelo, estado, log = treinar_sgda(treino, espec, config_treino)
    return modelo, estado, log


def _falha(mensagem: str, codigo: int, **extras):
    return {"sucesso": False, "mensagem": mensagem, "codigo": codigo, **extras}


class ControlePipeline:
    def __init__(self, config: ConfigExecucao):
        self.config = config
        self.hash = config.hash_config()
        self.repo = RepositorioExecucao(config.saida, self.hash, config.semente)
        self._divisao = None

    # --- auxiliares ---

    def divisao(self):
        """(treino, validação, teste), determinística pela semente de divisão."""
        if self._divisao is None:
            dados = carregar_dados(self.config)
            self._divisao = dividir_dados(dados, self.config.fracoes, self.config.semente_divisao)
            logger.info("Divisão: treino=%d validação=%d teste=%d", *(d.n for d in self._divisao))
        return self._divisao

    def espec_backbone(self, dim: int) -> EspecBackbone:
        return EspecBackbone.padrao(dim, self.config.ocultas, self.config.ativacao)

    def config_treino(self, mu: float):
        dados = self.config.treino.to_dict()
        dados["mu"] = mu
        dados["semente"] = self.config.semente
        return ConfigTreino.from_dict(dados)

    def modelos_osp(self) -> dict:
        modelos = {}
        for i, mu in enumerate(self.config.mus):
            if not self.repo.existe_modelo(f"modelo_mu_{i}"):
                raise ErroEntrada(f"Modelo para μ={mu} não encontrado em {self.config.saida}; rode 'train' antes")
            modelos[mu] = self.repo.carregar_modelo(f"modelo_mu_{i}")
        return modelos

    def _executar(self, etapa: str, funcao):
        """Roda uma etapa convertendo erros de domínio no dicionário de resultado."""
        try:
            return funcao()
        except ErroEntrada as e:
            self.repo.salvar_erro(etapa, e)
            return _falha(f"Erro de validação em '{etapa}': {e}", CODIGO_ENTRADA, etapa=etapa)
        except ErroNumerico as e:
            if e.checkpoint is not None:
                self.repo.salvar_modelo("checkpoint", e.checkpoint)
            self.repo.salvar_erro(etapa, e)
            return _falha(f"Erro numérico em '{etapa}': {e}", CODIGO_NUMERICO, etapa=etapa)

    # --- etapas ---

    def treinar(self):
        return self._executar("treino", self._treinar)

    def _treinar(self):
        self.repo.salvar_config(self.config)
        treino, _, _ = self.divisao()
        espec = self.espec_backbone(treino.dim)
        tarefas = [(treino, espec, self.config_treino(mu)) for mu in self.config.mus]

        if self.config.trabalhadores > 1:
            with ProcessPoolExecutor(max_workers=self.config.trabalhadores) as pool:
                resultados = list(pool.map(_treinar_mu, tarefas))
        else:
            resultados = [_treinar_mu(t) for t in tarefas]

        for i, (mu, (modelo, estado, log)) in enumerate(zip(self.config.mus, resultados)):
            self.repo.salvar_modelo(f"modelo_mu_{i}", modelo)
            self.repo.salvar_log_treino(i, mu, log)
            logger.info("μ=%g treinado: λ=%s", mu, [round(v, 4) for v in estado.lambdas])

        if self.config.incluir_sr:
            t = self.config.treino
            sr = aquecer(treino, espec, treino.num_classes, t.epocas_aquecimento, t.taxa_aquecimento, self.config.semente, t.tamanho_lote)
            self.repo.salvar_modelo("modelo_sr", sr)
        for i, payoff in enumerate(self.config.payoffs_dg):
            dg = treinar_dg(treino, espec, ConfigDG(payoff), self.config_treino(self.config.treino.mu))
            self.repo.salvar_modelo(f"modelo_dg_{i}", dg)

        return {"sucesso": True, "mensagem": f"{len(self.config.mus)} modelos treinados em '{self.config.saida}'.", "codigo": CODIGO_OK}

    def selecionar(self):
        return self._executar("selecao", self._selecionar)

    def _selecionar(self):
        _, val, _ = self.divisao()
        receita = Receita.osp(self.modelos_osp())
        grade = receita.grade(self.config.limiares, val)
        self.repo.salvar_grade(grade)
        criterio = self.config.criterio
        if criterio.modo == "erro":
            resultado = grade.escolher_erro_restrito(criterio.alvo)
        else:
            resultado = grade.escolher_cobertura_restrita(criterio.alvo)
        logger.info("Seleção (%s=%g): %r", criterio.modo, criterio.alvo, resultado)
        return {
            "sucesso": True,
            "mensagem": f"Selecionado μ*={resultado.parametro:g}, t*={resultado.t:g}"
            + ("" if resultado.viavel else " (nenhuma célula viável)"),
            "codigo": CODIGO_OK if resultado.viavel else CODIGO_INVIAVEL,
            "selecao": resultado,
            "receita": receita,
        }

    def avaliar(self):
        return self._executar("avaliacao", self._avaliar)

    def _avaliar(self):
        selecao = self._selecionar()
        resultado = selecao["selecao"]
        receita = selecao["receita"]
        _, val, teste = self.divisao()
        metricas = avaliar_familia(receita.familia(resultado.parametro, resultado.t), teste)
        registro = {
            "criterio": self.config.criterio.to_dict(),
            "mu": resultado.parametro,
            "t": resultado.t,
            "cobertura": metricas.cobertura,
            "erro": metricas.erro_bruto,
            "erro_unilateral_por_classe": list(metricas.erro_unilateral_por_classe),
            "sobreposicao": sobreposicao_osp(receita.modelos[resultado.parametro], resultado.t, teste),
            "viavel": resultado.viavel,
            "validacao": resultado.to_dict(),
            "baselines": self._baselines(val, teste),
        }
        self.repo.salvar_metricas(registro)
        return {
            "sucesso": True,
            "mensagem": f"Teste: cobertura {metricas.cobertura:.4f}, erro {metricas.erro_bruto:.4f}",
            "codigo": selecao["codigo"],
            "metricas": registro,
        }

    def _receitas_baseline(self):
        receitas = []
        if self.config.incluir_sr and self.repo.existe_modelo("modelo_sr"):
            receitas.append(Receita.sr(self.repo.carregar_modelo("modelo_sr")))
        dg = {o: self.repo.carregar_modelo(f"modelo_dg_{i}") for i, o in enumerate(self.config.payoffs_dg) if self.repo.existe_modelo(f"modelo_dg_{i}")}
        if dg:
            receitas.append(Receita.dg(dg))
        return receitas

    def _baselines(self, val, teste):
        """Baselines selecionados pelo mesmo critério, medidos no teste."""
        saida = {}
        criterio = self.config.criterio
        for receita in self._receitas_baseline():
            grade = receita.grade(self.config.limiares, val)
            if criterio.modo == "erro":
                escolha = grade.escolher_erro_restrito(criterio.alvo)
            else:
                escolha = grade.escolher_cobertura_restrita(criterio.alvo)
            m = avaliar_familia(receita.familia(escolha.parametro, escolha.t), teste)
            saida[receita.metodo] = {
                "parametro": escolha.parametro,
                "t": escolha.t,
                "cobertura": m.cobertura,
                "erro": m.erro_bruto,
                "viavel": escolha.viavel,
            }
        return saida

    def curva(self):
        return self._executar("curva", self._curva)

    def _curva(self):
        if not self.config.alvos_curva:
            raise ErroEntrada("Lista de alvos da curva vazia")
        _, val, teste = self.divisao()
        modelos = self.modelos_osp()
        alvos = self.config.alvos_curva
        pontos, selecoes = curva_cobertura_erro(Receita.osp(modelos), alvos, val, teste, self.config.limiares)
        todos = list(pontos)
        for receita in self._receitas_baseline():
            extras, _ = curva_cobertura_erro(receita, alvos, val, teste, self.config.limiares)
            todos.extend(extras)
        self.repo.salvar_curva(todos)

        sobreposicao = tabela_sobreposicao(modelos, selecoes, teste)
        for alvo, linha in zip(alvos, sobreposicao):
            linha["alvo"] = alvo
        self.repo.salvar_sobreposicao(sobreposicao)

        relatorio = None
        if len(selecoes) >= 2:
            receita = Receita.osp(modelos)
            familias = [receita.familia(s.parametro, s.t) for s in selecoes]
            relatorio = checar_consistencia(familias, teste)
            self.repo.salvar_relatorio("consistencia.json", relatorio.to_dict())

        inviaveis = sum(not p.viavel for p in pontos)
        return {
            "sucesso": True,
            "mensagem": f"Curva com {len(pontos)} pontos ({inviaveis} alvo(s) sem célula viável).",
            "codigo": CODIGO_OK if inviaveis == 0 else CODIGO_INVIAVEL,
            "pontos": todos,
            "consistencia": relatorio,
        }

    def executar(self):
        """Pipeline completo; para na primeira etapa que falhar."""
        logger.info("Execução %s em '%s'", self.hash[:12], self.config.saida)
        resultado = self.treinar()
        if not resultado["sucesso"]:
            return resultado
        resultado = self.avaliar()
        if not resultado["sucesso"] or not self.config.alvos_curva:
            return resultado
        curva = self.curva()
        if not curva["sucesso"]:
            return curva
        curva["codigo"] = max(resultado["codigo"], curva["codigo"])
        curva["metricas"] = resultado["metricas"]
        return curva

    # --- oráculo ---

    def rodar_oraculo(self, tipo_classe: str, eps: float, modo: str = "sc", classe_k: int = 0, grade_alfa: str = "uniforme", parametros=None):
        return self._executar("oraculo", lambda: self._rodar_oraculo(tipo_classe, eps, modo, classe_k, grade_alfa, parametros))

    def _rodar_oraculo(self, tipo_classe, eps, modo, classe_k, grade_alfa, parametros):
        dados = carregar_dados(self.config)
        classe = oraculo.ClasseHipoteses(tipo_classe, parametros)
        if modo == "osp":
            solucao = oraculo.resolver_osp_exato(dados, classe, classe_k, eps)
        elif modo == "sc":
            solucao = oraculo.resolver_sc_exato(dados, classe, eps)
        elif modo == "desacoplado":
            if grade_alfa == "criticos":
                grade = oraculo.grade_alfas_criticos(dados.n, dados.num_classes, eps)
            else:
                grade = oraculo.grade_alfas_uniforme(dados.num_classes)
            solucao = oraculo.resolver_osp_desacoplado(dados, classe, eps, grade)
        else:
            raise ErroEntrada(f"Modo de oráculo desconhecido: {modo}")
        relatorio = {"modo": modo, "classe": tipo_classe, "eps": eps, **solucao.to_dict()}
        self.repo.salvar_relatorio(f"oraculo_{modo}.json", relatorio)
        return {
            "sucesso": True,
            "mensagem": f"Oráculo {modo}: valor {solucao.valor:.4f}, erro {solucao.erro:.4f}",
            "codigo": CODIGO_OK,
            "solucao": solucao,
        }
