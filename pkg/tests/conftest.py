import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.models.dados import ConjuntoRotulado  # noqa: E402
from app.models.rede import EspecBackbone, ModeloSeletivo  # noqa: E402


def modelo_de_scores(num_classes: int, saidas_extras: int = 0) -> ModeloSeletivo:
    """Rede linear identidade: a entrada log(p) sai como softmax(log p) = p."""
    S = num_classes + saidas_extras
    espec = EspecBackbone((S, S), "identity")
    return ModeloSeletivo(espec, num_classes, [np.eye(S)], [np.zeros(S)], np.eye(S), np.zeros(S), saidas_extras)


def entrada_de_scores(scores) -> np.ndarray:
    return np.log(np.atleast_2d(np.asarray(scores, dtype=np.float64)))


@pytest.fixture
def dez_pontos():
    """x = 0.0, 0.1, ..., 0.9 com rótulos fixos."""
    X = np.arange(10).reshape(-1, 1) / 10.0
    y = [1, 1, 1, 1, 1, 0, 0, 0, 1, 0]
    return ConjuntoRotulado(X, y, num_classes=2)


@pytest.fixture
def blobs():
    """Três classes bem separadas em 2-D."""
    rng = np.random.default_rng(7)
    centros = np.array([[4.0, 0.0], [-4.0, 0.0], [0.0, 4.0]])
    y = np.repeat(np.arange(3), 40)
    X = centros[y] + 0.5 * rng.standard_normal((120, 2))
    return ConjuntoRotulado(X, y, num_classes=3)


@pytest.fixture
def modelo_tanh():
    return ModeloSeletivo.inicializar(EspecBackbone((2, 5, 4), "tanh"), 3, semente=11)
