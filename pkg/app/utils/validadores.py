import math
import re

import numpy as np

from app.utils.erros import ErroEntrada


class ValidadorConfig:
    @staticmethod
    def validar_fracoes(fracoes) -> tuple:
        """
        Frações de divisão (treino, validação, teste): positivas e somando 1.
        Retorna a tupla normalizada em float.
        """
        fracoes = tuple(float(f) for f in fracoes)
        if len(fracoes) != 3:
            raise ErroEntrada(f"Esperadas 3 frações (treino, validação, teste), recebidas {len(fracoes)}")
        if any(f <= 0 for f in fracoes):
            raise ErroEntrada(f"Frações devem ser positivas: {fracoes}")
        if abs(sum(fracoes) - 1.0) > 1e-9:
            raise ErroEntrada(f"Frações devem somar 1 (soma = {sum(fracoes)})")
        return fracoes

    @staticmethod
    def validar_positivo(nome: str, valor, inteiro: bool = False, permitir_zero: bool = False):
        try:
            numero = int(valor) if inteiro else float(valor)
        except (TypeError, ValueError, OverflowError):
            raise ErroEntrada(f"{nome} deve ser numérico: {valor!r}")
        if inteiro and float(valor) != numero:
            raise ErroEntrada(f"{nome} deve ser inteiro: {valor!r}")
        if not math.isfinite(numero) or numero < 0 or (numero == 0 and not permitir_zero):
            raise ErroEntrada(f"{nome} deve ser {'não negativo' if permitir_zero else 'positivo'}: {valor!r}")
        return numero

    @staticmethod
    def validar_probabilidade(nome: str, valor) -> float:
        valor = float(valor)
        if not (0.0 <= valor <= 1.0):
            raise ErroEntrada(f"{nome} deve estar em [0, 1]: {valor}")
        return valor

    @staticmethod
    def validar_grade(nome: str, valores) -> tuple:
        """Grade não vazia de números finitos."""
        try:
            valores = tuple(float(v) for v in valores)
        except (TypeError, ValueError):
            raise ErroEntrada(f"Grade {nome} deve ser uma lista de números: {valores!r}")
        if not valores:
            raise ErroEntrada(f"Grade {nome} vazia")
        if not all(math.isfinite(v) for v in valores):
            raise ErroEntrada(f"Grade {nome} com valores não finitos")
        return valores


class ValidadorMistura:
    @staticmethod
    def validar_priors(priors) -> np.ndarray:
        priors = np.asarray(priors, dtype=np.float64)
        if (priors < 0).any() or abs(priors.sum() - 1.0) > 1e-9:
            raise ErroEntrada(f"Priors devem ser não negativos e somar 1: {priors.tolist()}")
        return priors

    @staticmethod
    def validar_covariancia(cov) -> np.ndarray:
        """Simétrica e definida positiva (Cholesky precisa existir)."""
        cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
        if cov.shape[0] != cov.shape[1] or not np.allclose(cov, cov.T):
            raise ErroEntrada("Covariância deve ser quadrada e simétrica")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError:
            raise ErroEntrada("Covariância não é definida positiva")
        return cov


class ValidadorCsv:
    PADRAO_FEATURE = re.compile(r"^f(\d+)$")

    @staticmethod
    def limpar(campo: str) -> str:
        """Remove espaços e o BOM que planilhas costumam deixar no início do arquivo."""
        if campo is None:
            return ""
        return str(campo).replace("\ufeff", "").strip()

    @staticmethod
    def validar_cabecalho(cabecalho) -> int:
        """
        Cabeçalho `f0,...,f{d-1},label`. Retorna d.
        """
        campos = [ValidadorCsv.limpar(c) for c in cabecalho]
        if len(campos) < 2 or campos[-1] != "label":
            raise ErroEntrada("Cabeçalho deve terminar na coluna 'label' e ter ao menos uma feature")
        for i, campo in enumerate(campos[:-1]):
            casamento = ValidadorCsv.PADRAO_FEATURE.match(campo)
            if not casamento or int(casamento.group(1)) != i:
                raise ErroEntrada(f"Coluna {i} deveria se chamar 'f{i}', encontrado '{campo}'")
        return len(campos) - 1

    @staticmethod
    def validar_rotulo(campo: str) -> int:
        texto = ValidadorCsv.limpar(campo)
        if not re.fullmatch(r"[+-]?\d+", texto):
            raise ValueError(f"rótulo não inteiro: '{texto}'")
        rotulo = int(texto)
        if rotulo < 0:
            raise ValueError(f"rótulo negativo: {rotulo}")
        return rotulo
