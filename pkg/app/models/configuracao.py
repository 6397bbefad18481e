import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from app.utils.erros import ErroEntrada
from app.utils.validadores import ValidadorConfig, ValidadorMistura

TIPOS_SINTETICOS = ("exemplo_analitico", "mistura_gaussiana", "blobs_separaveis")
MODOS_CRITERIO = ("erro", "cobertura")


def campos_conhecidos(cls, dados) -> dict:
    """Cópia de `dados` se todas as chaves forem campos de `cls`; senão ErroEntrada nomeando as sobras."""
    if not isinstance(dados, dict):
        raise ErroEntrada(f"{cls.__name__} espera um objeto JSON, recebeu {type(dados).__name__}")
    desconhecidos = set(dados) - {f.name for f in fields(cls)}
    if desconhecidos:
        raise ErroEntrada(f"Campos desconhecidos em {cls.__name__}: {sorted(desconhecidos)}")
    return dict(dados)


@dataclass
class ConfigTreino:
    """Hiperparâmetros do SGDA em duas escalas de tempo."""

    mu: float = 1.0
    epocas: int = 200
    tamanho_lote: int = 128
    taxa_min: float = 1e-3
    taxa_max: float = 1e-4
    decaimento: tuple = (0.1, 50)
    intervalo_backbone: int = 20
    semente: int = 0
    epocas_aquecimento: int = 50
    taxa_aquecimento: float = 1e-2
    lambda_max: float = None
    adaptativo: bool = False
    perda_irrestrita: bool = False
    ascensao_lambda: bool = True

    def __post_init__(self):
        self.mu = ValidadorConfig.validar_positivo("mu", self.mu, permitir_zero=True)
        self.epocas = ValidadorConfig.validar_positivo("epocas", self.epocas, inteiro=True, permitir_zero=True)
        self.epocas_aquecimento = ValidadorConfig.validar_positivo(
            "epocas_aquecimento", self.epocas_aquecimento, inteiro=True, permitir_zero=True
        )
        self.tamanho_lote = ValidadorConfig.validar_positivo("tamanho_lote", self.tamanho_lote, inteiro=True)
        self.taxa_min = ValidadorConfig.validar_positivo("taxa_min", self.taxa_min)
        self.taxa_max = ValidadorConfig.validar_positivo("taxa_max", self.taxa_max)
        self.taxa_aquecimento = ValidadorConfig.validar_positivo("taxa_aquecimento", self.taxa_aquecimento)
        self.intervalo_backbone = ValidadorConfig.validar_positivo(
            "intervalo_backbone", self.intervalo_backbone, inteiro=True
        )
        try:
            fator, epoca = self.decaimento
        except (TypeError, ValueError):
            raise ErroEntrada(f"decaimento deve ser (fator, época): {self.decaimento!r}")
        self.decaimento = (
            ValidadorConfig.validar_positivo("decaimento.fator", fator),
            ValidadorConfig.validar_positivo("decaimento.epoca", epoca, inteiro=True, permitir_zero=True),
        )
        self.semente = int(self.semente)
        if self.lambda_max is not None:
            self.lambda_max = ValidadorConfig.validar_positivo("lambda_max", self.lambda_max, permitir_zero=True)

    def to_dict(self):
        dados = asdict(self)
        dados["decaimento"] = list(self.decaimento)
        return dados

    @classmethod
    def from_dict(cls, dados):
        dados = campos_conhecidos(cls, dados)
        if "decaimento" in dados:
            dados["decaimento"] = tuple(dados["decaimento"])
        return cls(**dados)


@dataclass
class ConfigDG:
    """Baseline Deep Gamblers: payoff o ∈ [1, K)."""

    payoff: float = 1.5

    def validar(self, num_classes: int):
        if not (1.0 <= float(self.payoff) < num_classes):
            raise ErroEntrada(f"Payoff o={self.payoff} fora de [1, {num_classes})")

    def to_dict(self):
        return {"payoff": self.payoff}


@dataclass(frozen=True)
class CriterioSelecao:
    """ErrorConstrained(ε) com modo 'erro'; CoverageConstrained(ϱ) com modo 'cobertura'."""

    modo: str = "erro"
    alvo: float = 0.02

    def __post_init__(self):
        if self.modo not in MODOS_CRITERIO:
            raise ErroEntrada(f"Modo de critério desconhecido: {self.modo}")
        ValidadorConfig.validar_probabilidade("alvo", self.alvo)

    def to_dict(self):
        return {"modo": self.modo, "alvo": self.alvo}

    @classmethod
    def from_dict(cls, dados):
        return cls(**campos_conhecidos(cls, dados))


@dataclass
class EspecSintetico:
    tipo: str = "mistura_gaussiana"
    n: int = 5000
    semente: int = 0
    num_classes: int = 2
    medias: list = None
    covariancias: list = None
    priors: list = None

    def __post_init__(self):
        if self.tipo not in TIPOS_SINTETICOS:
            raise ErroEntrada(f"Tipo sintético desconhecido: {self.tipo} (use {', '.join(TIPOS_SINTETICOS)})")
        self.n = ValidadorConfig.validar_positivo("n", self.n, inteiro=True)
        self.semente = int(self.semente)
        if self.tipo == "exemplo_analitico":
            self.num_classes = 2
            return
        if self.tipo == "blobs_separaveis" and self.medias is None:
            angulos = 2 * np.pi * np.arange(self.num_classes) / self.num_classes
            self.medias = (6.0 * np.column_stack([np.cos(angulos), np.sin(angulos)])).tolist()
            self.covariancias = [np.eye(2).tolist() for _ in range(self.num_classes)]
        if self.medias is None:
            self.medias = [[-1.0, -1.0], [1.0, 1.0]][: self.num_classes] if self.num_classes == 2 else None
        if self.medias is None:
            raise ErroEntrada("Mistura gaussiana com K != 2 precisa das médias")
        if self.covariancias is None:
            dim = len(self.medias[0])
            self.covariancias = [np.eye(dim).tolist() for _ in range(self.num_classes)]
        if self.priors is None:
            self.priors = [1.0 / self.num_classes] * self.num_classes
        self.validar_mistura()

    def validar_mistura(self):
        if not (len(self.medias) == len(self.covariancias) == len(self.priors) == self.num_classes):
            raise ErroEntrada("Médias, covariâncias e priors devem ter K entradas")
        ValidadorMistura.validar_priors(self.priors)
        dim = len(self.medias[0])
        for m, c in zip(self.medias, self.covariancias):
            if len(m) != dim:
                raise ErroEntrada("Todas as médias devem ter a mesma dimensão")
            cov = ValidadorMistura.validar_covariancia(c)
            if cov.shape != (dim, dim):
                raise ErroEntrada(f"Covariância {cov.shape} incompatível com dimensão {dim}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, dados):
        return cls(**campos_conhecidos(cls, dados))


def grade_mus_mesa() -> tuple:
    """8 valores log-espaçados em [0.05, 16]."""
    return tuple(np.geomspace(0.05, 16.0, 8).tolist())


def grade_mus_completa() -> tuple:
    """30 valores: 10 igualmente espaçados em [0.01, 1] e 20 em (1, 16]."""
    return tuple(np.linspace(0.01, 1.0, 10).tolist() + np.linspace(1.0, 16.0, 21)[1:].tolist())


def grade_limiares(quantidade: int = 100) -> tuple:
    return tuple(np.linspace(0.0, 1.0, quantidade).tolist())


def alvos_curva_padrao() -> tuple:
    """ε_i = (i/2)% para i em 1..20."""
    return tuple(i / 200.0 for i in range(1, 21))


@dataclass
class ConfigExecucao:
    semente: int = 0
    semente_divisao: int = 1234
    fonte: dict = field(default_factory=lambda: {"sintetico": EspecSintetico().to_dict()})
    fracoes: tuple = (0.64, 0.16, 0.20)
    ocultas: tuple = (64, 64)
    ativacao: str = "relu"
    treino: ConfigTreino = field(default_factory=ConfigTreino)
    criterio: CriterioSelecao = field(default_factory=CriterioSelecao)
    mus: tuple = field(default_factory=grade_mus_mesa)
    limiares: tuple = field(default_factory=grade_limiares)
    alvos_curva: tuple = ()
    payoffs_dg: tuple = ()
    incluir_sr: bool = True
    trabalhadores: int = 1
    saida: str = "resultados"

    def __post_init__(self):
        if not isinstance(self.treino, ConfigTreino):
            self.treino = ConfigTreino.from_dict(self.treino)
        if not isinstance(self.criterio, CriterioSelecao):
            self.criterio = CriterioSelecao.from_dict(self.criterio)
        self.fracoes = ValidadorConfig.validar_fracoes(self.fracoes)
        self.mus = ValidadorConfig.validar_grade("mus", self.mus)
        self.limiares = ValidadorConfig.validar_grade("limiares", self.limiares)
        for mu in self.mus:
            ValidadorConfig.validar_positivo("mu", mu, permitir_zero=True)
        self.alvos_curva = tuple(sorted(ValidadorConfig.validar_probabilidade("alvo", a) for a in self.alvos_curva))
        self.payoffs_dg = tuple(float(o) for o in self.payoffs_dg)
        self.ocultas = tuple(int(w) for w in self.ocultas)
        self.trabalhadores = ValidadorConfig.validar_positivo("trabalhadores", self.trabalhadores, inteiro=True)
        self.semente = int(self.semente)
        self.semente_divisao = int(self.semente_divisao)
        self._validar_fonte()

    def _validar_fonte(self):
        if not isinstance(self.fonte, dict) or len(self.fonte) != 1:
            raise ErroEntrada("Fonte deve ser {'csv': caminho} ou {'sintetico': {...}}")
        if "csv" in self.fonte:
            if not os.path.exists(self.fonte["csv"]):
                raise ErroEntrada(f"Arquivo de dados não encontrado: {self.fonte['csv']}")
        elif "sintetico" in self.fonte:
            espec = self.fonte["sintetico"]
            if isinstance(espec, EspecSintetico):
                espec = espec.to_dict()
            self.fonte = {"sintetico": EspecSintetico.from_dict(espec).to_dict()}
        else:
            raise ErroEntrada(f"Fonte desconhecida: {list(self.fonte)}")

    def to_dict(self):
        return {
            "semente": self.semente,
            "semente_divisao": self.semente_divisao,
            "fonte": self.fonte,
            "fracoes": list(self.fracoes),
            "ocultas": list(self.ocultas),
            "ativacao": self.ativacao,
            "treino": self.treino.to_dict(),
            "criterio": self.criterio.to_dict(),
            "mus": list(self.mus),
            "limiares": list(self.limiares),
            "alvos_curva": list(self.alvos_curva),
            "payoffs_dg": list(self.payoffs_dg),
            "incluir_sr": self.incluir_sr,
            "trabalhadores": self.trabalhadores,
            "saida": self.saida,
        }

    @classmethod
    def from_dict(cls, dados):
        return cls(**campos_conhecidos(cls, dados))

    def hash_config(self) -> str:
        """SHA-256 do JSON canônico, sem o diretório de saída nem o número de trabalhadores."""
        dados = self.to_dict()
        dados.pop("saida")
        dados.pop("trabalhadores")
        texto = json.dumps(dados, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(texto.encode("utf-8")).hexdigest()
