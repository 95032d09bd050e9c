"""
Command line pipelines. Every subcommand produces a Report whose verdicts
decide the exit status: 0 when every exact verdict passes, 1 when one
fails and 2 when the input could not be processed.
"""
import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from morasskit import balg, cohen, lmodel, morass, plam, textio
from morasskit.checks import CheckReport
from morasskit.configuration import get_configuration
from morasskit.errors import MorassKitError
from morasskit.logging.handlers import configure_logging
from morasskit.timer import SectionTimes
from morasskit.version import __version__

logger = logging.getLogger(__name__)

TOOL = "morasskit"

Pipeline = Callable[["RunConfig", SectionTimes], Tuple[CheckReport, Optional[str]]]


@dataclass(frozen=True)
class RunConfig:
    command: str
    options: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.command not in PIPELINES:
            raise ValueError("Unknown command '{}'".format(self.command))
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError("The seed must be a non-negative integer")

    def get(self, name: str, default: Any = None) -> Any:
        value = self.options.get(name)
        return default if value is None else value


@dataclass
class Report:
    command: str
    config: Dict[str, Any]
    seed: int
    checks: CheckReport
    timing: Dict[str, float] = field(default_factory=dict)
    output: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.checks.passed

    def as_dict(self, timing: bool = True) -> Dict[str, Any]:
        report = {
            "schema": get_configuration().get_int(["report", "schema_version"], 1),
            "tool": TOOL,
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "verdicts": [
                {
                    "name": check.name,
                    "passed": check.passed,
                    "exact": check.exact,
                    "detail": check.detail,
                }
                for check in self.checks.checks
            ],
            "passed": self.passed,
        }
        if timing:
            report["timing"] = self.timing
        return report

    def to_json(self, timing: bool = True) -> str:
        return textio.dumps(self.as_dict(timing))

    def summary(self) -> str:
        lines = []
        for check in self.checks.checks:
            status = "pass" if check.passed else "FAIL"
            if not check.exact:
                status += " (surrogate)"
            lines.append("{:<36} {}".format(check.name, status))
        verdict = "passed" if self.passed else "failed"
        lines.append("{} {}".format(self.command, verdict))
        return "\n".join(lines)


def _indices(text: str) -> List[int]:
    return [int(balg.parse_generator(t)) for t in text.split(",") if t.strip()]


def _morass_build(config: RunConfig, times: SectionTimes):
    settings = get_configuration()
    rule = config.get("split", settings.get_constant(["morass", "split"], "zero"))
    with times.section("build"):
        p = morass.build_prefix(config.get("levels"), rule)
    text = textio.format_prefix(p)

    report = CheckReport()
    report.add("prefix", True, levels=list(p.levels), splits=list(p.splits))
    if config.get("out"):
        textio.save(config.get("out"), text)
        return report, None
    return report, text


def _morass_verify(config: RunConfig, times: SectionTimes):
    p = textio.load(config.get("file"), textio.parse_prefix)
    with times.section("verify"):
        report = morass.verify_axioms(p, config.get("pair_limit"), seed=config.seed)
    return report, None


def _construct(config: RunConfig, times: SectionTimes):
    settings = get_configuration()
    variant = config.get("variant", lmodel.PLAIN)
    stages = config.get("stages")
    rule = config.get("split", settings.get_constant(["construction", "split"], "last"))

    bits = config.get("bits")
    if bits is None:
        bits = cohen.BitStream.from_seed(stages, config.seed).format()
        logger.info("Drew bits {} from seed {}".format(bits, config.seed))

    needed = lmodel.alpha_sequence(stages, variant)[-1]
    N = max(config.get("levels", 1), needed, 1)
    if N > config.get("levels", 1):
        logger.info("Extending the prefix to {} levels for {} stages".format(N, stages))

    with times.section("build"):
        p = morass.build_prefix(N, rule)
        construction = lmodel.run_construction(
            p, stages, bits, variant, config.get("max_universe")
        )

    report = CheckReport()
    report.extend(construction.report)
    report.add(
        "plan",
        True,
        levels=N,
        alpha=list(construction.plan.alpha),
        fresh=[list(a) for a in construction.plan.fresh],
        extra=list(construction.plan.extra),
        bits=lmodel.parse_bits(bits),
    )

    if variant == lmodel.C_VARIANT and stages:
        top = lmodel.presentation(construction.models[construction.plan.alpha[-1]])
        stage_points = [a for a in construction.plan.extra if a is not None]
        with times.section("calg"):
            calg = balg.is_c_algebra(
                top, config.get("max_f"), seed=config.seed, preferred=stage_points
            )
        report.extend(calg, prefix="calg.")

    out = config.get("out")
    if out:
        textio.save(os.path.join(out, "morass.txt"), textio.format_prefix(p))
        for level, m in enumerate(construction.models):
            path = os.path.join(out, "level_{:03d}.model".format(level))
            textio.save(path, textio.format_model(m))
    return report, None


def _norm(config: RunConfig, times: SectionTimes):
    p = textio.load(config.get("file"), textio.parse_presentation)
    f = balg.SimpleFunction.parse(config.get("terms"))
    with times.section("norm"):
        value = balg.norm_simple(p, f, config.get("backend", balg.AUTO))

    report = CheckReport()
    report.add("norm", True, value=value, terms=f.format())
    return report, str(value)


def _calg_verify(config: RunConfig, times: SectionTimes):
    p = textio.load(config.get("file"), textio.parse_presentation)
    with times.section("verify"):
        report = balg.is_c_algebra(p, config.get("max_f"), seed=config.seed)
    return report, None


def _scenario(config: RunConfig, times: SectionTimes):
    n_star = config.get("nstar")
    report = balg.scenario_bounds(n_star, config.get("c"))
    if config.get("epsilon") is not None:
        chosen = balg.EmbeddingScenario(n_star, config.get("c"), config.get("epsilon"))
        report.add(
            "epsilon",
            True,
            epsilon=str(chosen.epsilon),
            epsilon_max=str(report.epsilon_max),
        )
    if config.get("z_norm") is not None:
        branch = balg.dichotomy_branch(n_star, config.get("z_norm"))
        report.add(
            "branch",
            branch.contradiction,
            branch=branch.branch,
            bit=branch.bit,
            approximant_bound=branch.approximant_bound,
            scaled_chain_norm=branch.scaled_chain_norm,
        )
    return report, str(report.epsilon_max)


def _cohen_dense(config: RunConfig, times: SectionTimes):
    p = cohen.CohenCondition.parse(config.get("p", "-"))
    n_star = config.get("nstar")
    oracle = cohen.FileOracle(config.get("oracle"), config.get("default"))

    q = cohen.density_check(p, n_star, oracle)
    report = CheckReport()
    report.add("extends", cohen.extends(p, q), p=p.format(), q=q.format())
    report.add("density", cohen.witnesses_density(q, n_star, oracle), q=q.format())
    return report, q.format()


def _cohen_guess(config: RunConfig, times: SectionTimes):
    decisions = textio.load(config.get("decisions"), textio.parse_decisions)
    guess = cohen.pigeonhole_guess(decisions)
    values = {index: value for index, _, value in decisions}

    report = CheckReport()
    report.add(
        "guess_size",
        len(guess.indices) >= guess.bound,
        condition=guess.condition.format(),
        size=len(guess.indices),
        bound=guess.bound,
    )
    report.add(
        "guess_values", all(values[i] == guess.j0[i] for i in guess.indices)
    )
    return report, guess.condition.format()


def _plam_pair(config: RunConfig) -> Tuple[plam.PCondition, plam.PCondition]:
    return (
        textio.load(config.get("p"), textio.parse_condition),
        textio.load(config.get("q"), textio.parse_condition),
    )


def _plam_stronger(config: RunConfig, times: SectionTimes):
    p, q = _plam_pair(config)
    report = CheckReport()
    report.add("stronger", plam.stronger(p, q), p=sorted(p.w), q=sorted(q.w))
    return report, None


def _plam_amalgam(config: RunConfig, times: SectionTimes):
    p, q = _plam_pair(config)
    amalgam = plam.compatible(p, q)
    oracle = plam.brute_force_upper_bound(p, q)

    report = CheckReport()
    report.add("compatible", amalgam is not None, indices=sorted(p.w | q.w))
    agrees = (amalgam is None) == (oracle is None)
    if amalgam is not None and oracle is not None:
        agrees = amalgam.points == oracle
    report.add("oracle_agrees", agrees)

    text = textio.format_condition(amalgam) if amalgam is not None else None
    if text and config.get("out"):
        textio.save(config.get("out"), text)
        text = None
    return report, text


def _plam_split(config: RunConfig, times: SectionTimes):
    base = textio.load_directory(config.get("base"), textio.parse_condition)
    fresh = _indices(config.get("fresh"))
    with times.section("split"):
        chain, antichain = plam.split_extensions(base, fresh)
    norms = plam.split_norms(chain, antichain, fresh)

    report = CheckReport()
    report.add(
        "extends_base",
        all(plam.stronger(c, chain) and plam.stronger(c, antichain) for c in base),
    )
    report.add("chain_norm", norms["chain"] == len(fresh), value=norms["chain"])
    report.add(
        "antichain_norm",
        norms["antichain"] == min(len(fresh), 1),
        value=norms["antichain"],
    )
    if len(fresh) > 1:
        report.add("incompatible", plam.compatible(chain, antichain) is None)

    out = config.get("out")
    if out:
        textio.save(os.path.join(out, "chain.cond"), textio.format_condition(chain))
        textio.save(
            os.path.join(out, "antichain.cond"), textio.format_condition(antichain)
        )
    return report, None


def _plam_limit(config: RunConfig, times: SectionTimes):
    conditions = textio.load_directory(config.get("system"), textio.parse_condition)
    system = {c.w: c for c in conditions}
    with times.section("limit"):
        limit = plam.PCondition(plam.limit_algebra(system))

    indices = sorted(limit.w)
    missing = [i for i in indices if plam.dense_witness(system, i) is None]
    report = CheckReport()
    report.add(
        "limit_stronger",
        all(plam.stronger(c, limit) for c in conditions),
        conditions=len(conditions),
        relations=len(limit.presentation.leq) + len(limit.presentation.dis),
    )
    report.add("dense", not missing, missing=missing)

    text = textio.format_condition(limit)
    if config.get("out"):
        textio.save(config.get("out"), text)
        return report, None
    return report, text


PIPELINES: Dict[str, Pipeline] = {
    "morass build": _morass_build,
    "morass verify": _morass_verify,
    "construct": _construct,
    "norm": _norm,
    "calg verify": _calg_verify,
    "scenario": _scenario,
    "cohen dense": _cohen_dense,
    "cohen guess": _cohen_guess,
    "plam stronger": _plam_stronger,
    "plam amalgam": _plam_amalgam,
    "plam split": _plam_split,
    "plam limit": _plam_limit,
}


def run(config: RunConfig) -> Report:
    times = SectionTimes()
    logger.info("Running {} with seed {}".format(config.command, config.seed))
    with times.section("total"):
        checks, output = PIPELINES[config.command](config, times)

    for check in checks.failures():
        logger.warning("Check {} failed: {}".format(check.name, check.detail))
    return Report(
        command=config.command,
        config=dict(sorted(config.options.items())),
        seed=config.seed,
        checks=checks,
        timing=times.as_dict(),
        output=output,
    )


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--config", help="YAML file merged over the defaults")
    common.add_argument("--seed", type=int, help="seed for sampling and drawn bits")
    common.add_argument("--log-level", default="WARNING", help="logging level")
    common.add_argument(
        "--log-json", action="store_true", help="log JSON records to stderr"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog=TOOL, description="Finite morass constructions and their checks."
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="group", required=True)

    morass_parser = commands.add_parser("morass", help="morass prefixes")
    morass_commands = morass_parser.add_subparsers(dest="action", required=True)
    build = morass_commands.add_parser("build", parents=[common])
    build.add_argument("--levels", type=int, required=True)
    build.add_argument("--split", help="zero, last, half, const:K or k0,k1,...")
    build.add_argument("--out")
    verify = morass_commands.add_parser("verify", parents=[common])
    verify.add_argument("file")
    verify.add_argument("--pair-limit", dest="pair_limit", type=int)

    construct = commands.add_parser("construct", parents=[common])
    construct.add_argument("--levels", type=int, default=1, help="minimum level")
    construct.add_argument("--stages", type=int, required=True)
    construct.add_argument("--bits", help="bit string; drawn from the seed if absent")
    construct.add_argument("--variant", choices=lmodel.VARIANTS, default=lmodel.PLAIN)
    construct.add_argument("--split")
    construct.add_argument("--max-universe", dest="max_universe", type=int)
    construct.add_argument("--maxF", dest="max_f", type=int)
    construct.add_argument("--out")

    norm = commands.add_parser("norm", parents=[common])
    norm.add_argument("file")
    norm.add_argument("--terms", required=True)
    norm.add_argument("--backend", choices=balg.BACKENDS)

    calg_parser = commands.add_parser("calg", help="c-algebra checks")
    calg_commands = calg_parser.add_subparsers(dest="action", required=True)
    calg = calg_commands.add_parser("verify", parents=[common])
    calg.add_argument("file")
    calg.add_argument("--maxF", dest="max_f", type=int)

    scenario = commands.add_parser("scenario", parents=[common])
    scenario.add_argument("--nstar", type=int, required=True)
    scenario.add_argument("--c", type=Fraction, required=True)
    scenario.add_argument("--z-norm", dest="z_norm", type=Fraction)
    scenario.add_argument("--epsilon", type=Fraction, help="accuracy to validate")

    cohen_parser = commands.add_parser("cohen", help="Cohen conditions")
    cohen_commands = cohen_parser.add_subparsers(dest="action", required=True)
    dense = cohen_commands.add_parser("dense", parents=[common])
    dense.add_argument("--p", default="-")
    dense.add_argument("--nstar", type=int, required=True)
    dense.add_argument("--oracle", required=True)
    dense.add_argument("--default", type=Fraction)
    guess = cohen_commands.add_parser("guess", parents=[common])
    guess.add_argument("--decisions", required=True)

    plam_parser = commands.add_parser("plam", help="presented algebra conditions")
    plam_commands = plam_parser.add_subparsers(dest="action", required=True)
    for name in ("stronger", "amalgam"):
        pair = plam_commands.add_parser(name, parents=[common])
        pair.add_argument("p")
        pair.add_argument("q")
        if name == "amalgam":
            pair.add_argument("--out")
    split = plam_commands.add_parser("split", parents=[common])
    split.add_argument("--base", required=True)
    split.add_argument("--fresh", required=True)
    split.add_argument("--out")
    limit = plam_commands.add_parser("limit", parents=[common])
    limit.add_argument("--system", required=True)
    limit.add_argument("--out")

    return parser


AMBIENT = ("group", "action", "json", "config", "seed", "log_level", "log_json")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    parts = (args.group, getattr(args, "action", None))
    command = " ".join(part for part in parts if part)

    settings = get_configuration()
    try:
        if args.config:
            settings.load(args.config)
        seed = args.seed if args.seed is not None else settings.get_int(["seed"], 0)
    except (MorassKitError, OSError) as e:
        print("error: {}".format(e), file=sys.stderr)
        return 2

    handler = configure_logging(
        args.log_level.upper(),
        json=args.log_json,
        run_metadata={"command": command, "seed": seed},
    )
    options = {k: v for k, v in vars(args).items() if k not in AMBIENT}

    try:
        report = run(RunConfig(command, options, seed))
    except (MorassKitError, ValueError, OSError) as e:
        logger.error("{} failed: {}".format(command, e))
        print("error: {}".format(e), file=sys.stderr)
        return 2

    handler.set_run_metadata(passed=report.passed)
    logger.info("{} finished".format(command))

    if args.json:
        print(report.to_json())
    else:
        if report.output is not None:
            print(report.output.rstrip("\n"))
        print(report.summary())

    return 0 if report.passed else 1
