"""
Geradores de dados sintéticos com função de regressão η conhecida.
"""
import logging

import numpy as np
from scipy.stats import multivariate_normal

from app.models.configuracao import EspecSintetico
from app.models.dados import ConjuntoRotulado
from app.utils.erros import ErroEntrada

logger = logging.getLogger(__name__)


def amostrar_exemplo_analitico(n: int, semente) -> ConjuntoRotulado:
    """X ~ U[0,1]; rótulo 0 com probabilidade x, senão rótulo 1."""
    if n < 1:
        raise ErroEntrada(f"n deve ser ≥ 1: {n}")
    rng = np.random.default_rng(semente)
    X = rng.uniform(0.0, 1.0, size=n)
    y = np.where(rng.uniform(0.0, 1.0, size=n) < X, 0, 1)
    return ConjuntoRotulado(X.reshape(-1, 1), y, num_classes=2)


def amostrar_mistura(espec: EspecSintetico) -> ConjuntoRotulado:
    """Rótulo sorteado dos priors; features da componente gaussiana da classe."""
    espec.validar_mistura()
    rng = np.random.default_rng(espec.semente)
    K = espec.num_classes
    y = rng.choice(K, size=espec.n, p=np.asarray(espec.priors, dtype=np.float64))
    dim = len(espec.medias[0])
    X = np.empty((espec.n, dim))
    for k in range(K):
        idx = np.flatnonzero(y == k)
        if idx.size:
            X[idx] = rng.multivariate_normal(espec.medias[k], espec.covariancias[k], size=idx.size)
    return ConjuntoRotulado(X, y, num_classes=K)


def densidades_mistura(espec: EspecSintetico, X) -> np.ndarray:
    """π_k · N(x; m_k, Σ_k) para cada ponto e classe, matriz (n, K)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return np.column_stack(
        [
            p * multivariate_normal(mean=m, cov=c).pdf(X).reshape(-1)
            for p, m, c in zip(espec.priors, espec.medias, espec.covariancias)
        ]
    )


def eta_mistura(espec: EspecSintetico, X) -> np.ndarray:
    """η_k(x) = P(Y = k | X = x) de uma mistura gaussiana."""
    dens = densidades_mistura(espec, X)
    total = dens.sum(axis=1, keepdims=True)
    return np.divide(dens, total, out=np.full_like(dens, 1.0 / dens.shape[1]), where=total > 0)


def sintetizar(espec: EspecSintetico) -> ConjuntoRotulado:
    """Determinístico dada a semente do EspecSintetico."""
    if espec.tipo == "exemplo_analitico":
        dados = amostrar_exemplo_analitico(espec.n, espec.semente)
    else:
        dados = amostrar_mistura(espec)
    logger.info("Sintetizado %s: %r", espec.tipo, dados)
    return dados
