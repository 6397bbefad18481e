import csv
import json
import logging
import os
import shutil

logger = logging.getLogger(__name__)


class DiretorioExecucao:
    def __init__(self, raiz="resultados"):
        """
        Único escritor de um diretório de execução.
        :param raiz: Pasta da execução (padrão: resultados)
        """
        self.raiz = raiz
        self._verificar_diretorio(self.raiz)

    def _verificar_diretorio(self, pasta):
        """Garante que a pasta exista."""
        if pasta and not os.path.exists(pasta):
            os.makedirs(pasta)

    def caminho(self, relativo: str) -> str:
        return os.path.join(self.raiz, relativo)

    def existe(self, relativo: str) -> bool:
        return os.path.exists(self.caminho(relativo))

    def _preparar(self, relativo: str) -> str:
        """Cria a subpasta e faz a cópia .bak de um arquivo que será sobrescrito."""
        destino = self.caminho(relativo)
        self._verificar_diretorio(os.path.dirname(destino))
        if os.path.exists(destino):
            try:
                shutil.copyfile(destino, destino + ".bak")
            except OSError as e:
                logger.warning("Falha ao criar backup de %s: %s", destino, e)
        return destino

    def ler_json(self, relativo: str):
        with open(self.caminho(relativo), "r", encoding="utf-8") as f:
            return json.load(f)

    def salvar_json(self, relativo: str, dados) -> str:
        destino = self._preparar(relativo)
        with open(destino, "w", encoding="utf-8") as f:
            json.dump(dados, f, indent=4, ensure_ascii=False, sort_keys=True)
        return destino

    def salvar_csv(self, relativo: str, linhas, colunas) -> str:
        destino = self._preparar(relativo)
        with open(destino, "w", newline="", encoding="utf-8") as f:
            escritor = csv.DictWriter(f, fieldnames=list(colunas))
            escritor.writeheader()
            escritor.writerows(linhas)
        return destino
