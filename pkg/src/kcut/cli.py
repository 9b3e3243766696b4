"""Command-line interface: analyze, adjust, plan, simulate, serve."""

from __future__ import annotations

import json
import pathlib
import sys

import click

from . import analysis, distributions, plan as plan_mod, risk, sim
from .audit import ContestDefinition
from .rng import GeneratorSpec

MODEL_CHOICES = "empirical|truncu|expcubic|file:<path>"


def resolve_model(spec: str, n: int) -> distributions.CutSizeDistribution:
    """Map a --model spec string to a discrete cut-size distribution."""
    if spec == "empirical":
        if n != 150:
            raise click.UsageError("the bundled empirical model is defined at n=150")
        return distributions.table1_pmf()
    if spec == "truncu":
        return distributions.discretize(distributions.TABLE1_TRUNCATED_UNIFORM, n)
    if spec == "expcubic":
        return distributions.discretize(distributions.TABLE1_EXPONENTIAL_CUBIC, n)
    if spec.startswith("file:"):
        path = pathlib.Path(spec[len("file:") :])
        records = distributions.load_cut_records(path.read_text(), n=n)
        return distributions.empirical_pmf(records)
    raise click.UsageError(f"unknown model {spec!r}; expected {MODEL_CHOICES}")


@click.group()
def main():
    """k-cut sampling toolkit for risk-limiting audits."""


@main.command()
@click.option("--model", "models", multiple=True,
              help=f"cut model ({MODEL_CHOICES}); repeatable. Default: all three named models.")
@click.option("--n", default=150, show_default=True, help="stack size")
@click.option("--kmax", default=16, show_default=True, help="largest cut count")
@click.option("--format", "fmt", type=click.Choice(["csv", "md"]), default="csv",
              show_default=True)
def analyze(models, n, kmax, fmt):
    """Convergence-to-uniform table: vd and eps per cut count."""
    specs = list(models) if models else ["empirical", "truncu", "expcubic"]
    sources = [resolve_model(m, n) for m in specs]
    table = analysis.convergence_table(sources, kmax, labels=specs)
    if fmt == "csv":
        click.echo(analysis.format_csv(table), nl=False)
    else:
        click.echo(analysis.format_markdown(table), nl=False)


@main.command()
@click.option("--model", default="empirical", show_default=True,
              help=f"cut model ({MODEL_CHOICES})")
@click.option("--n", default=150, show_default=True, help="stack size")
@click.option("--s-star", default=1000, show_default=True, help="planned sample-size cap")
@click.option("--alpha", default=0.05, show_default=True, help="risk limit")
@click.option("--budget", default=0.01, show_default=True,
              help="largest tolerated adjustment bound")
@click.option("--eps1-target", default=risk.DEFAULT_EPS1_TARGET, show_default=True,
              help="tail-mass target for the switched-draw quantile")
def adjust(model, n, s_star, alpha, budget, eps1_target):
    """Pick k and print the risk-limit adjustment for it."""
    source = resolve_model(model, n)
    k, adj = risk.choose_k(source, s_star, eps1_target=eps1_target, budget=budget)
    adjusted = risk.adjusted_risk_limit(alpha, adj.bound)
    click.echo(json.dumps({
        "k": k,
        "delta": adj.delta,
        "eps2": adj.eps2,
        "s_prime": adj.s_prime,
        "eps1": adj.eps1,
        "bound": adj.bound,
        "adjusted_alpha": adjusted,
    }))


@main.command("plan")
@click.option("--manifest", "manifest_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--s", required=True, type=int, help="sample size")
@click.option("--k", default=6, show_default=True, help="cuts per draw")
@click.option("--seed", required=True, type=int)
@click.option("--s-star", default=None, type=int,
              help="k-cut draw cap; defaults to s (all draws via k-cut)")
def plan_cmd(manifest_path, s, k, seed, s_star):
    """Seeded per-stack sampling plan for a ballot manifest."""
    manifest = plan_mod.parse_manifest(pathlib.Path(manifest_path).read_text())
    p = plan_mod.build_plan(manifest, s, k, seed, s_star=s_star)
    click.echo(p.to_json())


@main.group()
def simulate():
    """Monte Carlo validation experiments."""


@simulate.command()
@click.option("--model", default="empirical", show_default=True,
              help=f"cut model ({MODEL_CHOICES})")
@click.option("--n", default=150, show_default=True)
@click.option("--k", default=6, show_default=True)
@click.option("--trials", default=100_000, show_default=True)
@click.option("--seed", required=True, type=int)
def convergence(model, n, k, trials, seed):
    """Simulated k-cut draws vs the exact convolution."""
    source = resolve_model(model, n)
    result = sim.vd_convergence_experiment(source, k, trials, GeneratorSpec(seed))
    click.echo(json.dumps(result.report.to_json_dict()))


@simulate.command()
@click.option("--delta", required=True, type=float, help="per-draw switch probability")
@click.option("--s", default=1000, show_default=True, help="draws per trial")
@click.option("--trials", default=10_000, show_default=True)
@click.option("--seed", required=True, type=int)
@click.option("--rule", type=click.Choice(sorted(sim.REPLACEMENT_RULES)), default="winner",
              show_default=True)
@click.option("--alpha-prime", default=0.05, show_default=True)
@click.option("--n-total", default=1000, show_default=True, help="ballots in the stack")
@click.option("--winner-share", default=0.52, show_default=True,
              help="reported winner share; the true stack is an exact tie")
def coupling(delta, s, trials, seed, rule, alpha_prime, n_total, winner_share):
    """Paired uniform-vs-switched audit acceptance experiment."""
    reported_w = int(round(n_total * winner_share))
    contest = ContestDefinition(
        candidates=("A", "B"),
        reported_winner="A",
        reported_tallies={"A": reported_w, "B": n_total - reported_w},
        n_total=n_total,
    )
    stack = sim.stack_from_tallies(contest, {"A": n_total // 2, "B": n_total - n_total // 2})
    config = sim.CouplingConfig(contest=contest, stack=stack, draws=s, alpha_prime=alpha_prime)
    switch = sim.AdversarialSwitchModel(delta=delta, replacement=sim.REPLACEMENT_RULES[rule])
    report = sim.coupling_experiment(config, switch, trials, GeneratorSpec(seed))
    click.echo(json.dumps(report.to_json_dict()))


@main.command()
@click.option("--port", default=8642, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", required=True, type=click.Path(file_okay=False))
@click.option("--static", "static_dir", default=None, type=click.Path(file_okay=False),
              help="directory of console assets to serve at /")
def serve(port, host, data_dir, static_dir):
    """Run the local audit session service."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    sys.exit(main())
