"""
Perceptron multicamadas com backbone compartilhado e K cabeças normalizadas
por softmax: f(x) = softmax(<w_k, ξ_θ(x)>).

Gradientes são calculados à mão (modo reverso) para a família fixa de perdas
definida em `app.models.perdas`. Toda a aritmética é em float64.
"""
import json
import logging
from dataclasses import dataclass

import numpy as np

from app.models.dados import ConjuntoRotulado
from app.utils.erros import ErroEntrada, ErroFormato, ErroNumerico

logger = logging.getLogger(__name__)

VERSAO_FORMATO = 1

ATIVACOES = {
    "relu": (lambda a: np.maximum(a, 0.0), lambda a: (a > 0).astype(np.float64)),
    "tanh": (np.tanh, lambda a: 1.0 - np.tanh(a) ** 2),
    "identity": (lambda a: a, lambda a: np.ones_like(a)),
}


def softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class EspecBackbone:
    """ξ_θ: larguras (entrada, ocultas..., features) e a ativação de cada camada."""

    larguras: tuple
    ativacao: str = "relu"

    def __post_init__(self):
        larguras = tuple(int(w) for w in self.larguras)
        object.__setattr__(self, "larguras", larguras)
        if len(larguras) < 2:
            raise ErroEntrada("Backbone precisa de pelo menos as larguras de entrada e de saída")
        if any(w <= 0 for w in larguras):
            raise ErroEntrada(f"Larguras devem ser positivas: {larguras}")
        if self.ativacao not in ATIVACOES:
            raise ErroEntrada(f"Ativação desconhecida: {self.ativacao}")

    @property
    def dim_entrada(self) -> int:
        return self.larguras[0]

    @property
    def dim_features(self) -> int:
        return self.larguras[-1]

    @classmethod
    def padrao(cls, dim_entrada: int, ocultas=(64, 64), ativacao="relu"):
        """Arquitetura de mesa: duas camadas ocultas de 64 unidades, relu."""
        ocultas = tuple(ocultas)
        if not ocultas:
            return cls((dim_entrada, dim_entrada), "identity")
        return cls((dim_entrada,) + ocultas, ativacao)

    def to_dict(self):
        return {"larguras": list(self.larguras), "ativacao": self.ativacao}

    @classmethod
    def from_dict(cls, dados):
        return cls(larguras=tuple(dados["larguras"]), ativacao=dados.get("ativacao", "relu"))


@dataclass
class GradienteBundle:
    """Derivadas parciais na mesma ordem e formas de `ModeloSeletivo.parametros()`."""

    partes: list


class ModeloSeletivo:
    def __init__(self, espec: EspecBackbone, num_classes: int, pesos, vieses, W_cabeca, b_cabeca, saidas_extras: int = 0):
        """
        :param pesos, vieses: Camadas do backbone θ (W_l com forma (entrada, saída))
        :param W_cabeca: Matriz (dim_features, K + extras); a coluna k é w_k
        :param saidas_extras: Saídas além das K classes (1 para o f_? do Deep Gamblers)
        """
        self.espec = espec
        self.num_classes = int(num_classes)
        self.saidas_extras = int(saidas_extras)
        self.pesos = [np.asarray(W, dtype=np.float64) for W in pesos]
        self.vieses = [np.asarray(b, dtype=np.float64) for b in vieses]
        self.W_cabeca = np.asarray(W_cabeca, dtype=np.float64)
        self.b_cabeca = np.asarray(b_cabeca, dtype=np.float64)
        self._checar_formas()

    @property
    def num_saidas(self) -> int:
        return self.num_classes + self.saidas_extras

    def _checar_formas(self):
        larguras = self.espec.larguras
        if self.num_classes < 1:
            raise ErroFormato("K deve ser ao menos 1")
        if len(self.pesos) != len(larguras) - 1 or len(self.vieses) != len(larguras) - 1:
            raise ErroFormato(f"Esperadas {len(larguras) - 1} camadas no backbone")
        for i, (W, b) in enumerate(zip(self.pesos, self.vieses)):
            if W.shape != (larguras[i], larguras[i + 1]) or b.shape != (larguras[i + 1],):
                raise ErroFormato(f"Camada {i} com formas {W.shape}/{b.shape} incompatíveis com {larguras}")
        if self.W_cabeca.shape != (larguras[-1], self.num_saidas) or self.b_cabeca.shape != (self.num_saidas,):
            raise ErroFormato(f"Cabeças com formas {self.W_cabeca.shape}/{self.b_cabeca.shape} incompatíveis")

    @classmethod
    def inicializar(cls, espec: EspecBackbone, num_classes: int, semente: int, saidas_extras: int = 0):
        """Uniforme em ±√(6/(fan_in+fan_out)) por camada, vieses zero."""
        rng = np.random.default_rng(semente)
        larguras = list(espec.larguras) + [num_classes + saidas_extras]
        matrizes = []
        for fan_in, fan_out in zip(larguras[:-1], larguras[1:]):
            limite = np.sqrt(6.0 / (fan_in + fan_out))
            matrizes.append(rng.uniform(-limite, limite, size=(fan_in, fan_out)))
        vieses = [np.zeros(w) for w in larguras[1:]]
        return cls(espec, num_classes, matrizes[:-1], vieses[:-1], matrizes[-1], vieses[-1], saidas_extras)

    # --- avaliação ---

    def _entrada(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.espec.dim_entrada:
            raise ErroEntrada(f"Entrada com dimensão {X.shape[1]}, modelo espera {self.espec.dim_entrada}")
        return X

    def passo_forward(self, X):
        """Retorna (pré-ativações, ativações, logits, probabilidades) para o modo reverso."""
        ativar, _ = ATIVACOES[self.espec.ativacao]
        H = self._entrada(X)
        pre, ativ = [], [H]
        for W, b in zip(self.pesos, self.vieses):
            A = H @ W + b
            H = ativar(A)
            pre.append(A)
            ativ.append(H)
        Z = H @ self.W_cabeca + self.b_cabeca
        return pre, ativ, Z, softmax(Z)

    def logits(self, X) -> np.ndarray:
        return self.passo_forward(X)[2]

    def forward(self, X) -> np.ndarray:
        """Scores softmax. Vetor (K,) para um ponto, matriz (n, K) para um lote."""
        unico = np.asarray(X).ndim == 1
        P = self.passo_forward(X)[3]
        return P[0] if unico else P

    def scores_classes(self, X) -> np.ndarray:
        """Só as K colunas de classe (descarta saídas extras)."""
        return self.passo_forward(X)[3][:, : self.num_classes]

    # --- parâmetros ---

    def parametros(self) -> list:
        """Ordem declarada: W_1, b_1, ..., W_L, b_L, W_cabeça, b_cabeça."""
        lista = []
        for W, b in zip(self.pesos, self.vieses):
            lista.extend([W, b])
        lista.extend([self.W_cabeca, self.b_cabeca])
        return lista

    def num_parametros_backbone(self) -> int:
        """Quantos arrays de `parametros()` pertencem ao backbone θ."""
        return 2 * len(self.pesos)

    def copiar(self):
        return ModeloSeletivo(
            self.espec,
            self.num_classes,
            [W.copy() for W in self.pesos],
            [b.copy() for b in self.vieses],
            self.W_cabeca.copy(),
            self.b_cabeca.copy(),
            self.saidas_extras,
        )

    def to_dict(self):
        return {
            "versao_formato": VERSAO_FORMATO,
            "espec": self.espec.to_dict(),
            "num_classes": self.num_classes,
            "saidas_extras": self.saidas_extras,
            "parametros": [
                {"forma": list(p.shape), "valores": p.ravel(order="C").tolist()} for p in self.parametros()
            ],
        }

    @classmethod
    def from_dict(cls, dados):
        try:
            versao = dados["versao_formato"]
            if versao != VERSAO_FORMATO:
                raise ErroFormato(f"Versão de formato {versao} não suportada (esperada {VERSAO_FORMATO})")
            espec = EspecBackbone.from_dict(dados["espec"])
            arrays = []
            for p in dados["parametros"]:
                forma = tuple(p["forma"])
                valores = np.asarray(p["valores"], dtype=np.float64)
                if valores.size != int(np.prod(forma)):
                    raise ErroFormato(f"Array com {valores.size} valores não cabe na forma {forma}")
                arrays.append(valores.reshape(forma))
            camadas = len(espec.larguras) - 1
            if len(arrays) != 2 * camadas + 2:
                raise ErroFormato(f"Esperados {2 * camadas + 2} arrays de parâmetros, recebidos {len(arrays)}")
            return cls(
                espec,
                dados["num_classes"],
                arrays[0 : 2 * camadas : 2],
                arrays[1 : 2 * camadas : 2],
                arrays[-2],
                arrays[-1],
                dados.get("saidas_extras", 0),
            )
        except (KeyError, TypeError) as e:
            raise ErroFormato(f"Payload de modelo mal formado: {e}") from e
        except ErroEntrada as e:
            if isinstance(e, ErroFormato):
                raise
            raise ErroFormato(str(e)) from e

    def __repr__(self):
        return f"<ModeloSeletivo: {self.espec.larguras} {self.espec.ativacao} | K={self.num_classes}+{self.saidas_extras}>"


def serializar(modelo: ModeloSeletivo) -> bytes:
    return json.dumps(modelo.to_dict()).encode("utf-8")


def desserializar(payload: bytes, num_classes: int = None) -> ModeloSeletivo:
    """
    Reconstrói o modelo. Se `num_classes` for dado, exige que o payload tenha esse K.
    """
    try:
        dados = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ErroFormato(f"Payload de modelo ilegível: {e}") from e
    modelo = ModeloSeletivo.from_dict(dados)
    if num_classes is not None and modelo.num_classes != num_classes:
        raise ErroFormato(f"Modelo com K={modelo.num_classes}, avaliação espera K={num_classes}")
    return modelo


def backward(modelo: ModeloSeletivo, lote: ConjuntoRotulado, perda, detalhes: bool = False):
    """
    Valor da perda e gradiente exato em relação a todos os parâmetros.
    :param perda: Objeto de `app.models.perdas` com o método avaliar(P, Z, y)
    :return: (valor, GradienteBundle) ou (valor, GradienteBundle, extras) com detalhes=True
    """
    lote.exigir_nao_vazio()
    _, derivar = ATIVACOES[modelo.espec.ativacao]
    pre, ativ, Z, P = modelo.passo_forward(lote.X)

    valor, gP, gZ, extras = perda.avaliar(P, Z, lote.y)
    if not np.isfinite(valor):
        raise ErroNumerico("Perda não finita", termo=getattr(perda, "nome", type(perda).__name__))

    # dL/dZ = gZ + J_softmaxᵀ gP
    delta = np.zeros_like(Z) if gZ is None else np.array(gZ, dtype=np.float64)
    if gP is not None:
        delta += P * (gP - np.sum(gP * P, axis=1, keepdims=True))

    H = ativ[-1]
    grad_W_cabeca = H.T @ delta
    grad_b_cabeca = delta.sum(axis=0)
    dH = delta @ modelo.W_cabeca.T

    grads = []
    for camada in range(len(modelo.pesos) - 1, -1, -1):
        dA = dH * derivar(pre[camada])
        grads.append(ativ[camada].T @ dA)
        grads.append(dA.sum(axis=0))
        dH = dA @ modelo.pesos[camada].T
    # grads foi montado de trás para frente em pares (W, b)
    partes = []
    for i in range(len(grads) - 2, -1, -2):
        partes.extend([grads[i], grads[i + 1]])
    partes.extend([grad_W_cabeca, grad_b_cabeca])

    bundle = GradienteBundle(partes)
    if detalhes:
        return float(valor), bundle, extras
    return float(valor), bundle
