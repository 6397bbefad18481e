"""
Oráculos exatos para classes de hipóteses finitas.

Todos os solvers trabalham sobre "átomos": grupos de pontos da amostra que
nenhum candidato da classe consegue separar. Restrições empíricas são
conferidas em contagens inteiras (P̂ ≤ ε  ⇔  contagem ≤ ⌊ε·n⌋), o que evita
empates espúrios de ponto flutuante.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from app.models.conjuntos import (
    Complemento,
    ConjuntoExplicito,
    ConjuntoVazio,
    Diferenca,
    Intersecao,
    Intervalo,
    LimiarInferior,
    LimiarSuperior,
    Uniao,
)
from app.models.dados import ConjuntoRotulado
from app.models.decisao import FamiliaConjuntos, FamiliaDecisao, avaliar
from app.utils.erros import ErroCapacidade, ErroEntrada
from app.utils.sinteticos import amostrar_exemplo_analitico, densidades_mistura

logger = logging.getLogger(__name__)

LIMITE_TUPLAS = 10**7
TIPOS_CLASSE = ("limiar_superior", "limiar_inferior", "limiares", "intervalo", "lista_explicita")

_SUPERIOR, _INFERIOR, _INTERVALO, _EXPLICITO = 0, 1, 2, 3


def limite_contagem(eps: float, n: int) -> int:
    """Maior contagem c com c/n ≤ eps."""
    return int(math.floor(eps * n + 1e-9))


# --- classe de hipóteses e tabela de candidatos ---


class TabelaCandidatos:
    def __init__(self, dados, codigos, params, eixo, atomo, num_atomos, inicio=None, fim=None, matriz=None, explicitos=None):
        """
        Candidatos distintos (por comportamento na amostra), na ordem de enumeração.
        Para classes 1-D cada candidato é um intervalo de átomos [inicio, fim);
        para listas explícitas, uma coluna de `matriz` (átomos × candidatos).
        """
        self.n = dados.n
        self.num_classes = dados.num_classes
        self.dim = dados.dim
        self.codigos = codigos
        self.params = params
        self.eixo = eixo
        self.atomo = atomo
        self.num_atomos = num_atomos
        self.inicio, self.fim = inicio, fim
        self.matriz = matriz
        self.explicitos = explicitos

        rotulos_atomo = np.zeros((num_atomos, dados.num_classes), dtype=np.int64)
        np.add.at(rotulos_atomo, (atomo, dados.y), 1)
        if matriz is None:
            acumulado = np.vstack([np.zeros((1, dados.num_classes), dtype=np.int64), np.cumsum(rotulos_atomo, axis=0)])
            self.contagens = acumulado[fim] - acumulado[inicio]
        else:
            self.contagens = matriz.T.astype(np.int64) @ rotulos_atomo
        self.massa = self.contagens.sum(axis=1)

    @property
    def tamanho(self) -> int:
        return int(self.massa.shape[0])

    def erros_como(self, k: int) -> np.ndarray:
        """Contagem de pontos com rótulo ≠ k em cada candidato."""
        return self.massa - self.contagens[:, k]

    def atomos(self, c: int) -> np.ndarray:
        if self.matriz is not None:
            return self.matriz[:, c].astype(bool)
        marca = np.zeros(self.num_atomos, dtype=bool)
        marca[self.inicio[c] : self.fim[c]] = True
        return marca

    def compativeis(self, usados: np.ndarray) -> np.ndarray:
        """Candidatos sem nenhum átomo em comum com `usados`."""
        if self.matriz is not None:
            return (self.matriz.T.astype(np.int64) @ usados.astype(np.int64)) == 0
        acumulado = np.concatenate([[0], np.cumsum(usados)])
        return (acumulado[self.fim] - acumulado[self.inicio]) == 0

    def pertinencia_pontos(self, c: int) -> np.ndarray:
        if c < 0:
            return np.zeros(self.n, dtype=bool)
        return self.atomos(c)[self.atomo]

    def conjunto(self, c: int):
        if c < 0:
            return ConjuntoVazio()
        codigo = self.codigos[c]
        if codigo == _SUPERIOR:
            return LimiarSuperior(self.params[c, 0], self.eixo)
        if codigo == _INFERIOR:
            return LimiarInferior(self.params[c, 0], self.eixo)
        if codigo == _INTERVALO:
            return Intervalo(self.params[c, 0], self.params[c, 1], self.eixo)
        return self.explicitos[c]


class ClasseHipoteses:
    def __init__(self, tipo: str, parametros=None, eixo: int = 0):
        """
        Classe finita 𝒮.
        :param tipo: limiar_superior ({x > t}), limiar_inferior ({x ≤ t}), limiares (ambos),
                     intervalo ({a < x ≤ b}) ou lista_explicita
        :param parametros: Grade de cortes (tipos 1-D; None = cortes entre pontos da amostra)
                           ou lista de subconjuntos de pontos (lista_explicita)
        :param eixo: Coordenada usada pelos tipos 1-D
        """
        if tipo not in TIPOS_CLASSE:
            raise ErroEntrada(f"Tipo de classe desconhecido: {tipo}")
        if tipo == "lista_explicita" and parametros is None:
            raise ErroEntrada("Lista explícita precisa dos subconjuntos")
        self.tipo = tipo
        self.parametros = parametros
        self.eixo = int(eixo)

    def _cortes(self, valores: np.ndarray) -> np.ndarray:
        if self.parametros is not None:
            return np.unique(np.asarray(self.parametros, dtype=np.float64))
        u = np.unique(valores)
        return np.concatenate([[u[0] - 1.0], (u[:-1] + u[1:]) / 2.0, [u[-1] + 1.0]])

    def tabela(self, dados: ConjuntoRotulado, limite: int = LIMITE_TUPLAS) -> TabelaCandidatos:
        dados.exigir_nao_vazio()
        if self.tipo == "lista_explicita":
            return self._tabela_explicita(dados)
        if self.eixo >= dados.dim:
            raise ErroEntrada(f"Eixo {self.eixo} fora da dimensão {dados.dim}")

        valores = dados.X[:, self.eixo]
        cortes = self._cortes(valores)
        G = cortes.shape[0]
        if G == 0:
            raise ErroEntrada("Enumeração vazia: nenhum corte na grade")
        celula = np.searchsorted(cortes, valores, side="left")
        ocupadas, atomo = np.unique(celula, return_inverse=True)

        codigos, params, lo, hi = [], [], [], []
        i = np.arange(G)
        if self.tipo in ("limiar_superior", "limiares"):
            codigos.append(np.full(G, _SUPERIOR))
            params.append(np.column_stack([cortes, cortes]))
            lo.append(i + 1)
            hi.append(np.full(G, G + 1))
        if self.tipo in ("limiar_inferior", "limiares"):
            codigos.append(np.full(G, _INFERIOR))
            params.append(np.column_stack([cortes, cortes]))
            lo.append(np.zeros(G, dtype=np.int64))
            hi.append(i + 1)
        if self.tipo == "intervalo":
            if G * (G - 1) // 2 > limite:
                raise ErroCapacidade(f"Classe de intervalos com {G * (G - 1) // 2} candidatos", limite)
            a, b = np.triu_indices(G, 1)
            codigos.append(np.full(a.shape[0], _INTERVALO))
            params.append(np.column_stack([cortes[a], cortes[b]]))
            lo.append(a + 1)
            hi.append(b + 1)

        codigos = np.concatenate(codigos)
        params = np.vstack(params)
        # células → átomos ocupados
        inicio = np.searchsorted(ocupadas, np.concatenate(lo), side="left")
        fim = np.searchsorted(ocupadas, np.concatenate(hi), side="left")
        vazio = fim <= inicio
        inicio[vazio], fim[vazio] = 0, 0

        _, primeiros = np.unique(np.column_stack([inicio, fim]), axis=0, return_index=True)
        manter = np.sort(primeiros)
        logger.debug("Classe %s: %d candidatos distintos de %d", self.tipo, manter.shape[0], codigos.shape[0])
        return TabelaCandidatos(
            dados, codigos[manter], params[manter], self.eixo, atomo, ocupadas.shape[0], inicio=inicio[manter], fim=fim[manter]
        )

    def _tabela_explicita(self, dados):
        conjuntos = [ConjuntoExplicito(s) for s in self.parametros]
        if not conjuntos:
            raise ErroEntrada("Enumeração vazia: lista explícita sem conjuntos")
        pert = np.column_stack([c.contem(dados.X) for c in conjuntos])
        _, primeiros = np.unique(pert, axis=1, return_index=True)
        manter = np.sort(primeiros)
        pert = pert[:, manter]
        assinaturas, atomo = np.unique(pert, axis=0, return_inverse=True)
        return TabelaCandidatos(
            dados,
            np.full(manter.shape[0], _EXPLICITO),
            np.zeros((manter.shape[0], 2)),
            self.eixo,
            atomo.reshape(-1),
            assinaturas.shape[0],
            matriz=assinaturas,
            explicitos=[conjuntos[j] for j in manter],
        )

    def tamanho(self, dados: ConjuntoRotulado) -> int:
        return self.tabela(dados).tamanho

    def __repr__(self):
        return f"<ClasseHipoteses: {self.tipo} | eixo={self.eixo}>"


# --- tipos de resultado ---


@dataclass(frozen=True)
class AlocacaoAlfa:
    alfas: tuple

    def __post_init__(self):
        alfas = tuple(float(a) for a in self.alfas)
        object.__setattr__(self, "alfas", alfas)
        if any(a < 0 for a in alfas):
            raise ErroEntrada(f"α_k devem ser não negativos: {alfas}")
        if sum(alfas) > 1.0 + 1e-9:
            raise ErroEntrada(f"Σ α_k deve ser ≤ 1 (soma = {sum(alfas)})")

    def to_dict(self):
        return {"alfas": list(self.alfas)}


@dataclass
class SolucaoOraculo:
    familia: FamiliaConjuntos
    valor: float
    viavel: bool
    alfa: AlocacaoAlfa = None
    erro: float = 0.0
    conjuntos_brutos: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "valor": self.valor,
            "viavel": self.viavel,
            "erro": self.erro,
            "alfa": self.alfa.to_dict() if self.alfa else None,
            "familia": self.familia.to_dict(),
        }


def _familia_unica(dados, k, conjunto) -> FamiliaConjuntos:
    conjuntos = [ConjuntoVazio() for _ in range(dados.num_classes)]
    conjuntos[k] = conjunto
    return FamiliaConjuntos(conjuntos, dados.dim, disjunta=True)


# --- OSP ---


def _melhor_osp(tab: TabelaCandidatos, k: int, limite: int, objetivo: str) -> int:
    """Índice do maior candidato viável (primeiro em caso de empate) ou -1."""
    viaveis = np.flatnonzero(tab.erros_como(k) <= limite)
    if viaveis.size == 0:
        return -1
    valores = tab.massa if objetivo == "massa" else tab.contagens[:, k]
    return int(viaveis[np.argmax(valores[viaveis])])


def resolver_osp_exato(dados: ConjuntoRotulado, classe: ClasseHipoteses, k: int, eps_k: float, objetivo: str = "massa") -> SolucaoOraculo:
    """
    argmax_S P̂(S) s.t. P̂(x ∈ S, y ≠ k) ≤ eps_k sobre a classe.
    Com objetivo="positivos" maximiza P̂(S, y = k). Sem candidato viável devolve o conjunto vazio.
    """
    if not (0.0 <= eps_k <= 1.0):
        raise ErroEntrada(f"eps_k deve estar em [0, 1]: {eps_k}")
    if not (0 <= k < dados.num_classes):
        raise ErroEntrada(f"Classe {k} fora de [0, {dados.num_classes})")
    if objetivo not in ("massa", "positivos"):
        raise ErroEntrada(f"Objetivo desconhecido: {objetivo}")
    tab = classe.tabela(dados)
    if tab.tamanho == 0:
        raise ErroEntrada("Enumeração vazia")

    c = _melhor_osp(tab, k, limite_contagem(eps_k, dados.n), objetivo)
    conjunto = tab.conjunto(c)
    if c < 0:
        valor = erro = 0.0
    else:
        valor = (tab.massa[c] if objetivo == "massa" else tab.contagens[c, k]) / dados.n
        erro = tab.erros_como(k)[c] / dados.n
    return SolucaoOraculo(_familia_unica(dados, k, conjunto), float(valor), True, erro=float(erro), conjuntos_brutos=(conjunto,))


# --- SC exato ---


def resolver_sc_exato(dados: ConjuntoRotulado, classe: ClasseHipoteses, eps: float, limite_tuplas: int = LIMITE_TUPLAS) -> SolucaoOraculo:
    """
    C(ε; 𝒮): maximiza Σ_k P̂(S_k) sobre K-uplas disjuntas na amostra com P̂(E) ≤ eps.

    Busca exaustiva em profundidade, com poda por viabilidade e por um limite
    superior da cobertura restante. Candidatos vazios na amostra equivalem ao
    conjunto vazio. Empates ficam com a K-upla lexicograficamente menor.
    """
    if not (0.0 <= eps <= 1.0):
        raise ErroEntrada(f"eps deve estar em [0, 1]: {eps}")
    tab = classe.tabela(dados)
    if tab.tamanho == 0:
        raise ErroEntrada("Enumeração vazia")
    K = dados.num_classes
    tuplas = (tab.tamanho + 1) ** K
    if tuplas > limite_tuplas:
        raise ErroCapacidade(f"Enumeração de {tuplas} K-uplas excede o limite", limite_tuplas)
    logger.debug("SC exato: %d candidatos, K=%d, %d K-uplas", tab.tamanho, K, tuplas)

    limite = limite_contagem(eps, dados.n)
    erros = np.column_stack([tab.erros_como(k) for k in range(K)])
    uteis = [np.flatnonzero((tab.massa > 0) & (erros[:, k] <= limite)) for k in range(K)]
    melhor_isolado = [int(tab.massa[u].max()) if u.size else 0 for u in uteis]
    cauda = np.concatenate([np.cumsum(melhor_isolado[::-1])[::-1], [0]])

    melhor = {"cobertura": -1, "escolha": None}

    def buscar(k, usados, cobertura, erro, escolha, livres):
        if k == K:
            if cobertura > melhor["cobertura"]:
                melhor["cobertura"], melhor["escolha"] = cobertura, list(escolha)
            return
        if cobertura + min(cauda[k], livres) <= melhor["cobertura"]:
            return
        candidatos = uteis[k]
        if candidatos.size:
            ok = erros[candidatos, k] <= limite - erro
            candidatos = candidatos[ok]
        if candidatos.size:
            candidatos = candidatos[tab.compativeis(usados)[candidatos]]

        if k == K - 1:
            if candidatos.size:
                c = int(candidatos[np.argmax(tab.massa[candidatos])])
                buscar(k + 1, usados, cobertura + int(tab.massa[c]), erro, escolha + [c], livres)
            else:
                buscar(k + 1, usados, cobertura, erro, escolha + [-1], livres)
            return

        for c in candidatos:
            c = int(c)
            buscar(
                k + 1,
                usados | tab.atomos(c),
                cobertura + int(tab.massa[c]),
                erro + int(erros[c, k]),
                escolha + [c],
                livres - int(tab.massa[c]),
            )
        buscar(k + 1, usados, cobertura, erro, escolha + [-1], livres)

    buscar(0, np.zeros(tab.num_atomos, dtype=bool), 0, 0, [], dados.n)

    conjuntos = [tab.conjunto(c) for c in melhor["escolha"]]
    familia = FamiliaConjuntos(conjuntos, dados.dim, disjunta=True)
    metricas = avaliar(familia, dados)
    return SolucaoOraculo(familia, melhor["cobertura"] / dados.n, True, erro=metricas.erro_bruto, conjuntos_brutos=tuple(conjuntos))


# --- esquema desacoplado (varredura em α) ---


def _composicoes(total: int, partes: int):
    """Todas as tuplas de `partes` inteiros não negativos somando `total`, em ordem lexicográfica."""
    for cortes in itertools.combinations(range(total + partes - 1), partes - 1):
        anterior, tupla = -1, []
        for c in cortes:
            tupla.append(c - anterior - 1)
            anterior = c
        tupla.append(total + partes - 1 - anterior - 1)
        yield tuple(tupla)


def grade_alfas_uniforme(num_classes: int, passo: float = None) -> list:
    """
    Grade uniforme na face Σ α_k = 1 do simplex: passo 0.1 para K=2, 0.25 para K ≥ 3.
    """
    if passo is None:
        passo = 0.1 if num_classes <= 2 else 0.25
    divisoes = int(round(1.0 / passo))
    return [AlocacaoAlfa(tuple(j / divisoes for j in c)) for c in _composicoes(divisoes, num_classes)]


def grade_alfas_criticos(n: int, num_classes: int, eps: float, limite: int = 10**6) -> list:
    """
    Todas as divisões do orçamento inteiro ⌊eps·n⌋ entre as classes.
    Os valores de OSP na amostra só mudam em múltiplos de 1/n, então esta grade
    alcança o mesmo máximo que qualquer α viável.
    """
    total = limite_contagem(eps, n)
    if total == 0 or eps == 0:
        return [AlocacaoAlfa(tuple(0.0 for _ in range(num_classes)))]
    quantidade = math.comb(total + num_classes - 1, num_classes - 1)
    if quantidade > limite:
        raise ErroCapacidade(f"Grade crítica com {quantidade} alocações", limite)
    return [AlocacaoAlfa(tuple(j / (eps * n) for j in c)) for c in _composicoes(total, num_classes)]


def resolver_osp_desacoplado(dados: ConjuntoRotulado, classe: ClasseHipoteses, eps: float, grade_alfas) -> SolucaoOraculo:
    """
    Para cada α: resolve os K OSP nos níveis α_k·eps (os T_k^α), faz
    S_k^α = T_k^α \\ ∪_{k'<k} T_{k'}^α e devolve o α de maior Σ_k P̂(S_k^α).
    """
    grade_alfas = list(grade_alfas)
    if not grade_alfas:
        raise ErroEntrada("Grade de α vazia")
    K = dados.num_classes
    tab = classe.tabela(dados)
    if tab.tamanho == 0:
        raise ErroEntrada("Enumeração vazia")

    melhor = None
    for alfa in grade_alfas:
        if not isinstance(alfa, AlocacaoAlfa):
            alfa = AlocacaoAlfa(alfa)
        if len(alfa.alfas) != K:
            raise ErroEntrada(f"Alocação com {len(alfa.alfas)} entradas para K={K}")
        escolhas = [_melhor_osp(tab, k, limite_contagem(alfa.alfas[k] * eps, dados.n), "massa") for k in range(K)]
        uniao = np.zeros(dados.n, dtype=bool)
        for c in escolhas:
            uniao |= tab.pertinencia_pontos(c)
        cobertura = int(uniao.sum())
        if melhor is None or cobertura > melhor[0]:
            melhor = (cobertura, alfa, escolhas)

    cobertura, alfa, escolhas = melhor
    brutos = [tab.conjunto(c) for c in escolhas]
    conjuntos = [Diferenca(brutos[k], brutos[:k]) for k in range(K)]
    familia = FamiliaConjuntos(conjuntos, dados.dim, disjunta=True)
    metricas = avaliar(familia, dados)
    return SolucaoOraculo(
        familia,
        cobertura / dados.n,
        metricas.erro_bruto <= eps + 1e-12,
        alfa=alfa,
        erro=metricas.erro_bruto,
        conjuntos_brutos=tuple(brutos),
    )


def massa_sobreposicao(conjuntos, dados: ConjuntoRotulado) -> float:
    """P̂(∪_{k≠k'} T_k ∩ T_k'): fração de pontos em dois ou mais conjuntos."""
    if isinstance(conjuntos, FamiliaConjuntos):
        conjuntos = conjuntos.conjuntos
    conjuntos = list(conjuntos)
    if len(conjuntos) < 2:
        raise ErroEntrada("Sobreposição exige ao menos 2 conjuntos")
    dados.exigir_nao_vazio()
    pert = np.column_stack([c.contem(dados.X) for c in conjuntos])
    return float(np.mean(pert.sum(axis=1) >= 2))


# --- exemplo analítico: P_X uniforme em [0,1], P(Y = classe 0 | x) = x ---


def cobertura_exemplo_analitico(eps: float):
    """(C(ε), corte de S_1, corte de S_2) = (2√ε, 1 − √ε, √ε), com S_1 = {x > 1−√ε}, S_2 = {x ≤ √ε}."""
    if not (0.0 <= eps < 0.25):
        raise ErroEntrada(f"eps deve estar em [0, 1/4): {eps}")
    raiz = math.sqrt(eps)
    return 2.0 * raiz, 1.0 - raiz, raiz


def verdade_osp_analitica(eps: float) -> float:
    """L_1(ε) na população: max(√(2ε), 1 − √(1 − 2ε)) sobre limiares {x > t} e {x ≤ t}."""
    if eps >= 0.5:
        return 1.0
    return max(math.sqrt(2.0 * eps), 1.0 - math.sqrt(1.0 - 2.0 * eps))


def massa_erro_populacional(conjunto):
    """(P(S), P(S, Y ≠ classe 0)) no exemplo analítico, para limiares."""
    if isinstance(conjunto, Diferenca) and not conjunto.removidos:
        conjunto = conjunto.base
    if isinstance(conjunto, ConjuntoVazio):
        return 0.0, 0.0
    if isinstance(conjunto, (LimiarSuperior, LimiarInferior)):
        t = min(max(conjunto.t, 0.0), 1.0)
        if isinstance(conjunto, LimiarSuperior):
            return 1.0 - t, (1.0 - t) ** 2 / 2.0
        return t, t - t * t / 2.0
    raise ErroEntrada(f"Conjunto sem forma fechada no exemplo analítico: {conjunto!r}")


def risco_bayes_limiar(dados: ConjuntoRotulado, eixo: int = 0) -> float:
    """Menor erro de classificação padrão entre pares complementares {x > t}, {x ≤ t} (K = 2)."""
    if dados.num_classes != 2:
        raise ErroEntrada("Risco de limiar definido só para K = 2")
    tab = ClasseHipoteses("limiar_superior", eixo=eixo).tabela(dados)
    total = np.bincount(dados.y, minlength=2)
    # classe 0 acima do corte e classe 1 abaixo, ou o contrário
    acima = tab.contagens
    erros_a = acima[:, 1] + (total[0] - acima[:, 0])
    erros_b = acima[:, 0] + (total[1] - acima[:, 1])
    return float(min(erros_a.min(), erros_b.min()) / dados.n)


@dataclass(frozen=True)
class LinhaTendencia:
    n: int
    desvio_cobertura: float
    violacao: float

    def to_dict(self):
        return {"n": self.n, "desvio_cobertura": self.desvio_cobertura, "violacao": self.violacao}


def tendencia_viabilidade_erm(eps: float, ns, sementes_por_n: int, semente_base: int = 0) -> list:
    """
    Para cada n, resolve OSP da classe 0 por ERM em amostras novas do exemplo
    analítico e mede |P(S) − L_1(eps)| e max(0, P(E¹_S) − eps) na população.
    Devolve as medianas por n.
    """
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ErroEntrada(f"Lista de n deve ser estritamente crescente: {ns}")
    verdade = verdade_osp_analitica(eps)
    classe = ClasseHipoteses("limiares")
    tabela = []
    for n in ns:
        desvios, violacoes = [], []
        for s in range(sementes_por_n):
            dados = amostrar_exemplo_analitico(n, [semente_base, n, s])
            solucao = resolver_osp_exato(dados, classe, 0, eps)
            massa, erro = massa_erro_populacional(solucao.conjuntos_brutos[0])
            desvios.append(abs(massa - verdade))
            violacoes.append(max(0.0, erro - eps))
        linha = LinhaTendencia(n, float(np.median(desvios)), float(np.median(violacoes)))
        logger.debug("Tendência ERM: %s", linha)
        tabela.append(linha)
    return tabela


# --- equivalências de formulação ---


def porta_para_conjuntos(porta, preditores, referencia: ConjuntoRotulado) -> FamiliaConjuntos:
    """S_k = Π_k ∩ Γ. Os Π_k precisam particionar os pontos de referência."""
    preditores = list(preditores)
    referencia.exigir_nao_vazio()
    pert = np.column_stack([p.contem(referencia.X) for p in preditores])
    if not (pert.sum(axis=1) == 1).all():
        raise ErroEntrada("Os preditores Π_k não particionam os pontos de referência")
    return FamiliaConjuntos([Intersecao(p, porta) for p in preditores], referencia.dim, disjunta=True)


def conjuntos_para_confianca(familia: FamiliaDecisao, referencia: ConjuntoRotulado) -> list:
    """C_k = (∪_{k'≠k} S_k')ᶜ = S_k ∪ R."""
    if not isinstance(familia, FamiliaConjuntos):
        raise ErroEntrada("Conversão exige uma família dada por conjuntos explícitos")
    referencia.exigir_nao_vazio()
    pert = np.column_stack([c.contem(referencia.X) for c in familia.conjuntos])
    if (pert.sum(axis=1) > 1).any():
        raise ErroEntrada("Família não é disjunta nos pontos de referência")
    conjuntos = familia.conjuntos
    return [Complemento(Uniao(*(c for j, c in enumerate(conjuntos) if j != k))) for k in range(len(conjuntos))]


def confianca_para_conjuntos(confianca, dim: int) -> FamiliaConjuntos:
    """Inversa: S_k = C_k \\ ∪_{k'≠k} C_k'."""
    confianca = list(confianca)
    return FamiliaConjuntos(
        [Diferenca(c, [o for j, o in enumerate(confianca) if j != k]) for k, c in enumerate(confianca)],
        dim,
        disjunta=True,
    )


# --- cobertura ótima de misturas gaussianas ---


def cobertura_bayes_mistura(espec, eps: float, resolucao: int = 400, margem: float = 6.0) -> float:
    """
    Cobertura seletiva ótima (sem restrição de classe) de uma mistura gaussiana
    1-D ou 2-D, por integração numa grade densa do η conhecido: aceita células em
    ordem crescente de 1 − max_k η_k até a massa de erro atingir eps.
    """
    medias = [np.atleast_1d(np.asarray(m, dtype=np.float64)) for m in espec.medias]
    covs = [np.atleast_2d(np.asarray(c, dtype=np.float64)) for c in espec.covariancias]
    dim = medias[0].shape[0]
    if dim > 2:
        raise ErroEntrada("Integração em grade disponível só para dimensão 1 ou 2")

    eixos = []
    for d in range(dim):
        lo = min(m[d] - margem * math.sqrt(c[d, d]) for m, c in zip(medias, covs))
        hi = max(m[d] + margem * math.sqrt(c[d, d]) for m, c in zip(medias, covs))
        eixos.append(np.linspace(lo, hi, resolucao))
    malha = np.stack(np.meshgrid(*eixos, indexing="ij"), axis=-1).reshape(-1, dim)
    volume = np.prod([e[1] - e[0] for e in eixos])

    densidades = densidades_mistura(espec, malha)
    massa = densidades.sum(axis=1) * volume
    erro = (densidades.sum(axis=1) - densidades.max(axis=1)) * volume
    total = massa.sum()

    razao = np.divide(erro, massa, out=np.ones_like(erro), where=massa > 0)
    ordem = np.argsort(razao, kind="stable")
    erro_acum = np.cumsum(erro[ordem]) / total
    aceitas = np.searchsorted(erro_acum, eps + 1e-15, side="right")
    return float(massa[ordem][:aceitas].sum() / total)
