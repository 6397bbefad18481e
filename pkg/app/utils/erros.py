class ErroEntrada(ValueError):
    """Entrada ou configuração inválida (código de saída 1)."""

    codigo_saida = 1


class ErroLeitura(ErroEntrada):
    def __init__(self, mensagem: str, linha: int):
        """
        Erro ao interpretar um arquivo de dados.
        :param linha: Número da linha (1 = cabeçalho) onde o problema apareceu
        """
        super().__init__(f"Linha {linha}: {mensagem}")
        self.linha = linha


class ErroFormato(ErroEntrada):
    """Payload de modelo com versão ou formas incompatíveis."""


class ErroCapacidade(ErroEntrada):
    def __init__(self, mensagem: str, limite: int):
        super().__init__(f"{mensagem} (limite configurado: {limite})")
        self.limite = limite


class ErroNumerico(ArithmeticError):
    codigo_saida = 2

    def __init__(self, mensagem: str, termo: str = "", checkpoint=None):
        """
        Perda não finita mesmo após o recorte das probabilidades.
        :param termo: Nome do termo da perda que estourou
        :param checkpoint: Último modelo com perda finita (se houver)
        """
        super().__init__(f"{mensagem} [termo: {termo}]" if termo else mensagem)
        self.termo = termo
        self.checkpoint = checkpoint
