from datetime import datetime


class RegistroEpoca:
    def __init__(self, epoca: int, soma_perda_restrita: float, restricoes, lambdas, phis, ausencias, data_hora: str = None):
        """
        Uma linha do log de treino.
        :param restricoes: C̃_k por classe, medidos no conjunto de treino inteiro
        :param ausencias: Quantos termos de minibatch ficaram sem exemplos, por classe
        :param data_hora: String com data e hora. Se None, pega a hora atual.
        """
        if epoca < 0:
            raise ValueError(f"Época inválida: {epoca}")

        self.epoca = int(epoca)
        self.soma_perda_restrita = float(soma_perda_restrita)
        self.restricoes = [float(c) for c in restricoes]
        self.lambdas = [float(v) for v in lambdas]
        self.phis = [float(v) for v in phis]
        self.ausencias = [int(a) for a in ausencias]

        if data_hora:
            self.data_hora = data_hora
        else:
            self.data_hora = datetime.now().strftime("%Y-%m-%d %H:%M:%S")

    @property
    def soma_restricoes(self) -> float:
        return sum(self.restricoes)

    def to_dict(self):
        return {
            "epoca": self.epoca,
            "soma_perda_restrita": self.soma_perda_restrita,
            "restricoes": self.restricoes,
            "lambdas": self.lambdas,
            "phis": self.phis,
            "ausencias": self.ausencias,
            "data_hora": self.data_hora,
        }

    @classmethod
    def from_dict(cls, dados):
        return cls(
            epoca=dados["epoca"],
            soma_perda_restrita=dados["soma_perda_restrita"],
            restricoes=dados["restricoes"],
            lambdas=dados["lambdas"],
            phis=dados["phis"],
            ausencias=dados.get("ausencias", [0] * len(dados["restricoes"])),
            data_hora=dados["data_hora"],
        )

    def __repr__(self):
        return f"[{self.data_hora}] época {self.epoca}: ΣL={self.soma_perda_restrita:.4f} ΣC={self.soma_restricoes:.4f}"
