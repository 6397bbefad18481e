import argparse
import json
import logging
import sys

from app.controllers.pipeline import CODIGO_ENTRADA, CODIGO_NUMERICO, ControlePipeline
from app.database.repositorios import exportar_csv
from app.models.configuracao import ConfigExecucao, EspecSintetico
from app.utils.erros import ErroEntrada, ErroNumerico
from app.utils.sinteticos import sintetizar

logger = logging.getLogger("seletiva")


def exibir_cabecalho(titulo: str):
    print("=" * 50)
    print(f"   {titulo}   ")
    print("=" * 50)


def criar_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seletiva", description="Classificação seletiva por previsão unilateral (OSP).")
    parser.add_argument("-v", "--verboso", action="store_true", help="Log em nível DEBUG")
    sub = parser.add_subparsers(dest="comando", required=True)

    comum = argparse.ArgumentParser(add_help=False)
    comum.add_argument("--config", help="Arquivo JSON com campos de ConfigExecucao")
    comum.add_argument("--saida", help="Diretório da execução")
    comum.add_argument("--dados", help="CSV de entrada (f0,...,f{d-1},label)")
    comum.add_argument("--semente", type=int)
    comum.add_argument("--semente-divisao", type=int, dest="semente_divisao")
    comum.add_argument("--mus", type=float, nargs="+")
    comum.add_argument("--epocas", type=int)
    comum.add_argument("--modo", choices=["erro", "cobertura"], help="Critério de seleção")
    comum.add_argument("--alvo", type=float, help="ε (modo erro) ou ϱ (modo cobertura)")
    comum.add_argument("--alvos-curva", type=float, nargs="+", dest="alvos_curva")
    comum.add_argument("--payoffs-dg", type=float, nargs="+", dest="payoffs_dg")
    comum.add_argument("--trabalhadores", type=int)

    s = sub.add_parser("synth", help="Gera um conjunto sintético em CSV")
    s.add_argument("tipo", choices=["exemplo_analitico", "mistura_gaussiana", "blobs_separaveis"])
    s.add_argument("destino", help="Caminho do CSV gerado")
    s.add_argument("--n", type=int, default=5000)
    s.add_argument("--semente", type=int, default=0)
    s.add_argument("--classes", type=int, default=2)

    for nome, ajuda in [
        ("train", "Treina os modelos da grade de μ (e baselines)"),
        ("select", "Seleciona (μ*, t*) na validação"),
        ("eval", "Seleciona e mede no teste"),
        ("curve", "Curvas cobertura × erro e tabela de sobreposição"),
        ("pipeline", "Execução completa"),
    ]:
        sub.add_parser(nome, parents=[comum], help=ajuda)

    o = sub.add_parser("oracle", parents=[comum], help="Oráculo exato sobre uma classe finita")
    o.add_argument("--classe", default="limiares", help="Tipo da classe de hipóteses")
    o.add_argument("--eps", type=float, required=True)
    o.add_argument("--tipo-oraculo", dest="tipo_oraculo", choices=["osp", "sc", "desacoplado"], default="sc")
    o.add_argument("--k", type=int, default=0, help="Classe do OSP")
    o.add_argument("--grade-alfa", dest="grade_alfa", choices=["uniforme", "criticos"], default="uniforme")
    return parser


def montar_config(args) -> ConfigExecucao:
    """Precedência: flag > arquivo > padrão."""
    dados = ConfigExecucao().to_dict()
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as f:
                arquivo = json.load(f)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ErroEntrada(f"Não foi possível ler a configuração {args.config}: {e}")
        if not isinstance(arquivo, dict):
            raise ErroEntrada(f"Configuração {args.config} deve ser um objeto JSON")
        arquivo.pop("hash_config", None)
        dados.update(arquivo)

    for campo in ("saida", "semente", "semente_divisao", "mus", "alvos_curva", "payoffs_dg", "trabalhadores"):
        valor = getattr(args, campo, None)
        if valor is not None:
            dados[campo] = valor
    if args.dados:
        dados["fonte"] = {"csv": args.dados}
    if args.epocas is not None:
        dados["treino"] = {**dados["treino"], "epocas": args.epocas}
    if args.modo is not None or args.alvo is not None:
        criterio = dict(dados["criterio"])
        if args.modo is not None:
            criterio["modo"] = args.modo
        if args.alvo is not None:
            criterio["alvo"] = args.alvo
        dados["criterio"] = criterio
    return ConfigExecucao.from_dict(dados)


def tela_synth(args) -> int:
    espec = EspecSintetico(tipo=args.tipo, n=args.n, semente=args.semente, num_classes=args.classes)
    dados = sintetizar(espec)
    exportar_csv(dados, args.destino)
    print(f">> {dados!r} gravado em '{args.destino}'")
    return 0


def tela_resultado(resultado: dict) -> int:
    print(f"\n>> {resultado['mensagem']}")
    metricas = resultado.get("metricas")
    if metricas:
        print(f"   μ*={metricas['mu']:g}  t*={metricas['t']:g}  cobertura={metricas['cobertura']:.4f}  erro={metricas['erro']:.4f}")
        for metodo, b in metricas.get("baselines", {}).items():
            print(f"   {metodo.upper():<4} cobertura={b['cobertura']:.4f}  erro={b['erro']:.4f}")
    for ponto in resultado.get("pontos", []) or []:
        marca = "" if ponto.viavel else "  (inviável)"
        print(f"   [{ponto.metodo}] ε={ponto.alvo:.3f}  ε̂={ponto.erro:.4f}  c={ponto.cobertura:.4f}{marca}")
    return resultado["codigo"]


def main(argv=None) -> int:
    args = criar_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verboso else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    try:
        if args.comando == "synth":
            return tela_synth(args)

        config = montar_config(args)
        sistema = ControlePipeline(config)
        exibir_cabecalho(f"{args.comando.upper()} | execução {sistema.hash[:12]}")
        if args.comando == "train":
            resultado = sistema.treinar()
        elif args.comando == "select":
            resultado = sistema.selecionar()
        elif args.comando == "eval":
            resultado = sistema.avaliar()
        elif args.comando == "curve":
            resultado = sistema.curva()
        elif args.comando == "oracle":
            resultado = sistema.rodar_oraculo(args.classe, args.eps, args.tipo_oraculo, args.k, args.grade_alfa)
        else:
            resultado = sistema.executar()
        return tela_resultado(resultado)
    except ErroEntrada as e:
        print(f"Erro de validação: {e}", file=sys.stderr)
        return CODIGO_ENTRADA
    except ErroNumerico as e:
        print(f"Erro numérico: {e}", file=sys.stderr)
        return CODIGO_NUMERICO


if __name__ == "__main__":
    sys.exit(main())
