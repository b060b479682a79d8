"""Command-line front-end: simulate, estimate, mc, validate.

All commands read a JSON config file; command-line flags override config
fields. Every random quantity flows from the single seed. See the README for
config schemas and file formats.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import exper, fileio, report, validate
from .dist import ShockFamily
from .equil import minimal_ne
from .errors import SchemaError, SupergameError
from .fit import FitOptions, naive_probit, sml_fit
from .lik import recyclable
from .model import GameKind, GameModel, Theta

_KINDS = {k.value: k for k in GameKind}
_FAMILIES = {f.value: f for f in ShockFamily}


@dataclass
class RunConfig:
    kind: str = "peer_effects_count"
    shock_family: str = "normal"
    games: list = field(default_factory=list)  # [{covariates, adjacency, outcomes}, ...]
    theta: dict | None = None
    n_draws: int = 10
    seed: int = 0
    order: str = "index"
    recycle: str = "auto"
    threads: int = 0  # 0: use SUPERGAME_THREADS or 1
    out: str | None = None
    write_shocks: bool = False
    optimizer: dict = field(default_factory=dict)
    design: dict = field(default_factory=dict)  # mc subcommand
    figures: bool = True
    source_path: str | None = None

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as err:
            raise SchemaError(f"cannot open config: {err}", path=path) from None
        except json.JSONDecodeError as err:
            raise SchemaError(f"invalid JSON: {err}", path=path, line=err.lineno) from None
        cfg = cls()
        if "covariates" in data or "outcomes" in data:
            data.setdefault("games", []).insert(
                0,
                {
                    "covariates": data.pop("covariates", None),
                    "adjacency": data.pop("adjacency", None),
                    "outcomes": data.pop("outcomes", None),
                },
            )
        for key, value in data.items():
            if not hasattr(cfg, key):
                raise SchemaError(f"unknown config field {key!r}", path=path)
            setattr(cfg, key, value)
        cfg.source_path = path
        if cfg.kind not in _KINDS:
            raise SchemaError(
                f"unknown model kind {cfg.kind!r}; expected one of {sorted(_KINDS)}", path=path
            )
        if cfg.shock_family not in _FAMILIES:
            raise SchemaError(f"unknown shock family {cfg.shock_family!r}", path=path)
        if cfg.n_draws < 1:
            raise SchemaError("n_draws must be at least 1", path=path)
        return cfg

    def apply_overrides(self, args) -> None:
        for src, dst in [
            ("seed", "seed"),
            ("draws", "n_draws"),
            ("order", "order"),
            ("recycle", "recycle"),
            ("threads", "threads"),
            ("out", "out"),
        ]:
            value = getattr(args, src, None)
            if value is not None:
                setattr(self, dst, value)

    @property
    def n_threads(self) -> int:
        if self.threads:
            return self.threads
        env = os.environ.get("SUPERGAME_THREADS")
        return int(env) if env else 1

    def fingerprint(self) -> str:
        """Hash of the config file bytes plus the effective seed and draw count."""
        h = hashlib.sha256()
        if self.source_path and os.path.exists(self.source_path):
            with open(self.source_path, "rb") as fh:
                h.update(fh.read())
        h.update(f"|seed={self.seed}|draws={self.n_draws}|order={self.order}".encode())
        for game in self.games:
            for key in ("covariates", "adjacency", "outcomes"):
                p = game.get(key)
                if p and os.path.exists(p):
                    with open(p, "rb") as fh:
                        h.update(fh.read())
        return h.hexdigest()


def _theta_from_config(cfg: RunConfig, model: GameModel) -> Theta:
    if cfg.theta is None:
        raise SchemaError("config must provide a 'theta' block", path=cfg.source_path)
    spec = cfg.theta
    return Theta(
        beta=spec["beta"],
        delta=spec["delta"],
        sender_effects=spec.get("sender_effects"),
        receiver_effects=spec.get("receiver_effects"),
    )


def _load_model(cfg: RunConfig, game_cfg: dict) -> GameModel:
    cov_path = game_cfg.get("covariates")
    if not cov_path:
        raise SchemaError("each game needs a 'covariates' path", path=cfg.source_path)
    X, _names, dyadic = fileio.read_covariates(cov_path)
    kind = _KINDS[cfg.kind]
    if dyadic != (kind is GameKind.DIRECTED_NETWORK_SUPPORT):
        raise SchemaError(
            f"covariate layout ({'dyadic' if dyadic else 'action'}) does not match kind {cfg.kind}",
            path=cov_path,
        )
    adjacency = None
    adj_path = game_cfg.get("adjacency")
    if adj_path:
        adjacency = fileio.read_adjacency(adj_path, X.shape[0])
    return GameModel(
        players=X.shape[0],
        actions_per_player=X.shape[1],
        covariates=X,
        adjacency=adjacency,
        kind=kind,
        shock_family=_FAMILIES[cfg.shock_family],
    )


def _fit_options(cfg: RunConfig) -> FitOptions:
    opts = FitOptions(seed=cfg.seed, order=cfg.order, recycle=cfg.recycle)
    table = {
        "grad_tol": "grad_tol",
        "rel_tol": "rel_tol",
        "max_iter": "max_iter",
        "effects_ridge": "effects_ridge",
        "two_stage": "two_stage",
        "refresh_rounds": "refresh_rounds",
    }
    for key, attr in table.items():
        if key in cfg.optimizer:
            setattr(opts, attr, cfg.optimizer[key])
    return opts


def _theta_json(theta: Theta) -> dict:
    out = {
        "beta": [list(map(float, b)) for b in theta.beta],
        "delta": [list(map(float, d)) for d in theta.delta],
    }
    if theta.sender_effects is not None:
        out["sender_effects"] = list(map(float, theta.sender_effects))
    if theta.receiver_effects is not None:
        out["receiver_effects"] = list(map(float, theta.receiver_effects))
    return out


def cmd_simulate(cfg: RunConfig) -> int:
    """Draw shocks, compute the minimal equilibrium, and write outcome files."""
    if not cfg.games:
        raise SchemaError("config lists no games", path=cfg.source_path)
    out_base = cfg.out or "outcomes"
    for i, game_cfg in enumerate(cfg.games):
        model = _load_model(cfg, game_cfg)
        theta = _theta_from_config(cfg, model)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(i,)))
        U = rng.standard_normal((model.players, model.actions_per_player))
        y = minimal_ne(model, theta, U)
        suffix = f"_{i}" if len(cfg.games) > 1 else ""
        out_path = game_cfg.get("outcomes") or f"{out_base}{suffix}.csv"
        fileio.write_outcomes(out_path, y)
        print(f"game {i}: wrote {out_path} ({int(y.sum())} active of {y.size})")
        if cfg.write_shocks:
            shock_path = os.path.splitext(out_path)[0] + "_shocks.csv"
            fileio.write_shocks(shock_path, U)
            print(f"game {i}: wrote {shock_path}")
    return 0


def cmd_estimate(cfg: RunConfig) -> int:
    """Fit by scenario-sampling SML, with a naive probit comparison block."""
    if not cfg.games:
        raise SchemaError("config lists no games", path=cfg.source_path)
    dataset = []
    for game_cfg in cfg.games:
        model = _load_model(cfg, game_cfg)
        out_path = game_cfg.get("outcomes")
        if not out_path:
            raise SchemaError("each game needs an 'outcomes' path", path=cfg.source_path)
        y = fileio.read_outcomes(out_path)
        if y.shape != (model.players, model.actions_per_player):
            raise SchemaError(
                f"outcome shape {y.shape} does not match the model "
                f"({model.players}, {model.actions_per_player})",
                path=out_path,
            )
        dataset.append((model, y))

    probit = naive_probit(dataset)
    if cfg.theta is not None:
        init = _theta_from_config(cfg, dataset[0][0])
    else:
        init = Theta(
            beta=probit.theta_hat.beta[0],
            delta=np.maximum(np.atleast_1d(probit.theta_hat.delta[0]), 0.02),
        )
    opts = _fit_options(cfg)
    result = sml_fit(dataset, init, cfg.n_draws, opts)

    payload = {
        "theta_hat": _theta_json(result.theta_hat),
        "labels": result.labels,
        "standard_errors": None
        if result.standard_errors is None
        else list(map(float, result.standard_errors)),
        "loglik": result.loglik,
        "n_draws": cfg.n_draws,
        "seed": cfg.seed,
        "order": cfg.order,
        "recycling": recyclable(dataset) and cfg.recycle != "off",
        "converged": result.converged,
        "iterations": result.iterations,
        "gradient_norm": result.gradient_norm,
        "hessian_condition": result.hessian_condition,
        "probit": {
            "theta_hat": _theta_json(probit.theta_hat),
            "loglik": probit.loglik,
            "converged": probit.converged,
        },
        "config_fingerprint": cfg.fingerprint(),
    }
    text = json.dumps(payload, indent=2)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(f"wrote {cfg.out}")
    else:
        print(text)
    return 0


def cmd_mc(cfg: RunConfig, full_scale: bool = False) -> int:
    """Run the replication study; write the summary CSV and figures."""
    design_kwargs = dict(cfg.design)
    if full_scale:
        design_kwargs.setdefault("replications", 500)
    design_kwargs.setdefault("seed", cfg.seed)
    design_kwargs.setdefault("n_draws", cfg.n_draws)
    design = exper.McDesign(**design_kwargs)
    outdir = cfg.out or "."
    os.makedirs(outdir, exist_ok=True)
    summary = exper.run_mc(design, n_jobs=cfg.n_threads)
    csv_path = os.path.join(outdir, "mc_summary.csv")
    exper.write_summary_csv(summary, csv_path)
    rep_path = os.path.join(outdir, "mc_replications.csv")
    exper.write_replications_csv(summary, rep_path)
    written = [csv_path, rep_path]
    if cfg.figures:
        written += report.render_mc_figures(summary, outdir)
    print(
        f"mean delta {summary.mean_delta:.4f}, sd {summary.sd_delta:.4f}, "
        f"coverage {summary.ci_coverage:.3f}, LR size {summary.lr_size:.3f}, "
        f"probit mean {summary.mean_delta_probit:.4f}, failed {summary.n_failed}"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_validate(level: str, seed: int) -> int:
    results = validate.run_suites(level=level, seed=seed)
    ok = True
    for res in results:
        print(res.line())
        for failure in res.failures[:10]:
            print(f"    - {failure}")
        ok = ok and res.passed
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supergame",
        description="Scenario-sampling simulated maximum likelihood for supermodular games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=False, help="path to a JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--draws", type=int, default=None, help="scenario draws per game")
        p.add_argument("--order", choices=["index", "sorted"], default=None)
        p.add_argument("--recycle", choices=["auto", "off"], default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--out", default=None)

    p_sim = sub.add_parser("simulate", help="simulate outcomes from a parameterized game")
    common(p_sim)
    p_est = sub.add_parser("estimate", help="estimate payoff parameters from outcome files")
    common(p_est)
    p_mc = sub.add_parser("mc", help="run the Monte Carlo replication study")
    common(p_mc)
    p_mc.add_argument("--full-scale", action="store_true", help="500 replications")
    p_mc.add_argument("--no-figures", action="store_true")
    p_val = sub.add_parser("validate", help="run the oracle and invariant suites")
    p_val.add_argument("--level", choices=["quick", "full"], default="quick")
    p_val.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.level, args.seed)
        if args.config:
            cfg = RunConfig.load(args.config)
        else:
            cfg = RunConfig()
        cfg.apply_overrides(args)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "estimate":
            return cmd_estimate(cfg)
        if args.command == "mc":
            if getattr(args, "no_figures", False):
                cfg.figures = False
            return cmd_mc(cfg, full_scale=getattr(args, "full_scale", False))
    except SchemaError as err:
        print(f"config/file error: {err}", file=sys.stderr)
        return 2
    except SupergameError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
