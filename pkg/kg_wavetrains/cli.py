"""
命令行接口 - KG Wave Trains CLI
"""
import click
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, List, NoReturn, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from . import __version__
from .config.presets import PRESETS, get_preset
from .config.settings import Settings
from .core.potential import parse_potential
from .core.solver import SolveConfig, WaveTrain, residual, solve
from .core.sweep import SweepRunner
from .core.validate import build_trace, check_k0, simulate_chain, trace_is_symmetric
from .exceptions import WaveTrainError
from .utils.file_manager import ResultStore, read_initial_profile
from .utils.logger import configure_logging, get_logger

# 退出码
EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2

CHECKS = ("residual", "k0", "chain", "trace")
INITIAL_KINDS = ("cosine", "vonmises")


class WaveTrainGroup(click.Group):
    """用法错误也以退出码 1 结束，2 只表示未收敛"""

    def make_context(self, *args, **kwargs):  # type: ignore[no-untyped-def]
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_INVALID
            raise

    def invoke(self, ctx):  # type: ignore[no-untyped-def]
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_INVALID
            raise


def _fail(message: str, code: int = EXIT_INVALID) -> NoReturn:
    get_logger("cli").error(message)
    click.echo(f"Error: {message}", err=True)
    raise SystemExit(code)


def _load_settings(config: Optional[str], **overrides) -> Settings:
    """加载配置文件，命令行显式给出的参数优先"""
    try:
        if config and not Path(config).exists():
            raise FileNotFoundError(f"config file not found: {config}")
        settings = Settings.load(Path(config) if config else None)
        updates = {key: value for key, value in overrides.items() if value is not None}
        return Settings(**{**settings.model_dump(), **updates})
    except (OSError, ValueError) as e:
        _fail(f"Invalid configuration: {e}")


def _parse_list(text: Optional[str], label: str) -> List[float]:
    if text is None:
        return []
    try:
        values = [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        _fail(f"{label} must be a comma-separated list of numbers, got '{text}'")
    if not values:
        _fail(f"{label} is empty")
    return values


def _echo_banner(title: str) -> None:
    click.echo("\n" + "=" * 60)
    click.echo(title)
    click.echo("=" * 60)


def _echo_wave_train(w: WaveTrain, outdir: Path) -> None:
    _echo_banner("KG WAVE TRAINS - SOLVE RESULT")
    click.echo(f"\nOutput:      {outdir.absolute()}")
    click.echo(f"Status:      {w.status.value}")
    click.echo(f"Iterations:  {w.iterations}")
    click.echo(f"omega^2:     {w.omega2:.12g}")
    click.echo(f"x_hat:       {w.xhat:.12g}")
    click.echo(f"Residual:    {w.residual_sup:.3e}")
    click.echo(f"Gamma:       {w.gamma_actual:.12g} (target {w.gamma:g})")
    click.echo(f"In cone:     {w.in_cone}")
    click.echo("\n" + "=" * 60 + "\n")


@click.group(cls=WaveTrainGroup)
@click.version_option(version=__version__)
@click.option('--verbose', '-v', is_flag=True, help='输出每步迭代的调试日志')
@click.option('--log-file', type=click.Path(dir_okay=False), help='同时写入日志文件')
def cli(verbose: bool, log_file: Optional[str]):
    """KG Wave Trains - Klein-Gordon 晶格周期行波求解器"""
    configure_logging(logging.DEBUG if verbose else logging.INFO,
                      Path(log_file) if log_file else None)


@cli.command(name="solve")
@click.option('--gamma', type=float, required=True, help='约束水平 γ > 0')
@click.option('--k', 'k', type=float, required=True, help='波数，k·N 必须为整数')
@click.option('--N', 'n_nodes', type=int, default=800, show_default=True, help='网格节点数')
@click.option('--potential', required=True, help='势函数，如 harmonic:c=1、exp_decay、quartic、saturating')
@click.option('--tol', type=float, help='不动点容差')
@click.option('--max-iter', type=int, help='最大迭代次数')
@click.option('--out', '-o', default='.', help='输出目录')
@click.option('--initial', default='cosine', show_default=True,
              help='初始剖面：cosine、vonmises 或已有 profile.csv 的路径')
@click.option('--xhat-method', type=click.Choice(['newton', 'gradient_flow']), help='x̂ 求解方法')
@click.option('--config', '-c', help='配置文件路径')
def solve_command(
    gamma: float,
    k: float,
    n_nodes: int,
    potential: str,
    tol: Optional[float],
    max_iter: Optional[int],
    out: str,
    initial: str,
    xhat_method: Optional[str],
    config: Optional[str],
):
    """求解单个波列并写出 profile.csv、trace.csv、meta.json"""
    settings = _load_settings(config, tol_fixedpoint=tol, max_iter=max_iter, xhat_method=xhat_method)
    outdir = Path(out)

    try:
        P = parse_potential(potential)
        start = initial if initial in INITIAL_KINDS else read_initial_profile(initial, n_nodes)
        cfg = SolveConfig(
            gamma=gamma,
            k=k,
            n=n_nodes,
            potential=P,
            tol_fixedpoint=settings.tol_fixedpoint,
            tol_xhat=settings.tol_xhat,
            max_iter=settings.max_iter,
            xhat_method=settings.xhat_method,
            initial=start,
            unimodal_slack=settings.unimodal_slack,
        )
        started_at = datetime.now().isoformat()
        w = solve(cfg)
        ResultStore(outdir, settings).write_wave_train(w, {
            "command": "solve",
            "tol_fixedpoint": settings.tol_fixedpoint,
            "max_iter": settings.max_iter,
            "started_at": started_at,
            "finished_at": datetime.now().isoformat(),
        })
    except (WaveTrainError, ValidationError) as e:
        _fail(str(e))

    _echo_wave_train(w, outdir)
    if not w.converged:
        raise SystemExit(EXIT_NOT_CONVERGED)


@cli.command()
@click.option('--gamma-list', help='逗号分隔的 γ 列表')
@click.option('--k-list', help='逗号分隔的 k 列表')
@click.option('--preset', type=click.Choice(sorted(PRESETS)), help='预设实验')
@click.option('--N', 'n_nodes', type=int, help='网格节点数（默认取预设或 800）')
@click.option('--potential', help='势函数（默认取预设）')
@click.option('--tol', type=float, help='不动点容差')
@click.option('--max-iter', type=int, help='最大迭代次数')
@click.option('--out', '-o', default='sweep', show_default=True, help='输出根目录')
@click.option('--workers', '-w', type=int, help='并行进程数')
@click.option('--initial', type=click.Choice(list(INITIAL_KINDS)), default='cosine', show_default=True)
@click.option('--nesting/--no-nesting', default=None, help='是否做轨迹嵌套诊断（默认取预设）')
@click.option('--config', '-c', help='配置文件路径')
def sweep(
    gamma_list: Optional[str],
    k_list: Optional[str],
    preset: Optional[str],
    n_nodes: Optional[int],
    potential: Optional[str],
    tol: Optional[float],
    max_iter: Optional[int],
    out: str,
    workers: Optional[int],
    initial: str,
    nesting: Optional[bool],
    config: Optional[str],
):
    """参数扫描 - 每个 (γ, k) 一个子目录，外加 summary.csv"""
    settings = _load_settings(config, tol_fixedpoint=tol, max_iter=max_iter, workers=workers)
    logger = get_logger("cli")

    experiment = get_preset(preset) if preset else None
    gammas = _parse_list(gamma_list, "--gamma-list") or (experiment.gammas if experiment else [])
    ks = _parse_list(k_list, "--k-list") or (experiment.ks if experiment else [])
    if not gammas or not ks:
        _fail("sweep needs --gamma-list and --k-list, or --preset")
    label = potential or (experiment.potential if experiment else None)
    if label is None:
        _fail("sweep needs --potential, or --preset")
    n = n_nodes or (experiment.n if experiment else 800)
    if nesting is None:
        nesting = bool(experiment and experiment.check_nesting)

    try:
        runner = SweepRunner(Path(out), settings, parse_potential(label), n, initial)
        results = runner.run((g, k) for g in gammas for k in ks)
        nested = runner.nesting(results) if nesting else None
        summary_path = runner.write_summary(results, nested)
    except (WaveTrainError, ValidationError) as e:
        _fail(str(e))

    _echo_banner("KG WAVE TRAINS - SWEEP SUMMARY")
    click.echo(f"\n{'gamma':>10} {'k':>8} {'omega^2':>18} {'residual':>10} {'iter':>6}  status")
    for result in results:
        w = result.wave_train
        if w is None:
            click.echo(f"{result.point.gamma:>10g} {result.point.k:>8g} {'-':>18} {'-':>10} {'-':>6}  error")
            continue
        click.echo(
            f"{w.gamma:>10g} {w.k.k:>8g} {w.omega2:>18.12g} {w.residual_sup:>10.2e} "
            f"{w.iterations:>6d}  {w.status.value}"
        )
    if nested is not None:
        click.echo(f"\nNested traces: {nested}")
    status = runner.get_status()
    click.echo(f"\nState: {status['state']} ({status['failures']} failure(s))")
    click.echo(f"\nSummary: {summary_path.absolute()}")
    click.echo("=" * 60 + "\n")

    if runner.failures:
        logger.error(f"{runner.failures} sweep point(s) failed")
        raise SystemExit(EXIT_INVALID)
    if not all(r.wave_train.converged for r in results if r.wave_train is not None):
        raise SystemExit(EXIT_NOT_CONVERGED)


def _run_checks(
    w: WaveTrain,
    checks: List[str],
    settings: Settings,
    particles: Optional[int],
    t_end: Optional[float],
    dt: Optional[float],
) -> List[Tuple[str, bool, str]]:
    """执行所选验证，返回 (名称, 是否通过, 说明)"""
    rows: List[Tuple[str, bool, str]] = []
    for name in checks:
        if name == "residual":
            value = float(np.max(np.abs(residual(w))))
            rows.append((name, value <= settings.residual_tol,
                         f"sup|R| = {value:.3e} (tol {settings.residual_tol:g})"))
        elif name == "k0":
            report = check_k0(w, quad_n=settings.quad_n)
            ok = max(report.energy_variation, report.period_mismatch) <= settings.k0_tol
            rows.append((name, ok, f"|omega*T-1| = {report.period_mismatch:.3e}, "
                                   f"energy variation = {report.energy_variation:.3e}"))
        elif name == "chain":
            report = simulate_chain(w, particles or settings.chain_particles, t_end, dt)
            amplitude = float(np.max(np.abs(w.X)))
            if w.potential.name == "harmonic":
                deviation_tol, drift_tol = settings.chain_linear_deviation_tol, settings.chain_linear_drift_tol
            else:
                deviation_tol, drift_tol = settings.chain_deviation_tol, settings.chain_drift_tol
            ok = report.max_deviation <= deviation_tol * amplitude and report.energy_drift <= drift_tol
            rows.append((name, ok, f"deviation = {report.max_deviation:.3e}, "
                                   f"drift = {report.energy_drift:.3e}"))
        elif name == "trace":
            ok = trace_is_symmetric(build_trace(w))
            rows.append((name, ok, f"symmetric = {ok}"))
    return rows


@cli.command()
@click.option('--in', 'in_dir', required=True, type=click.Path(file_okay=False), help='solve 的输出目录')
@click.option('--checks', default='residual', show_default=True,
              help='逗号分隔：residual,k0,chain,trace（chain 对 harmonic 势使用更严的 chain_linear_* 阈值）')
@click.option('--J', 'particles', type=int, help='晶格粒子数（默认取配置）')
@click.option('--t-end', type=float, help='晶格模拟时长（默认 1/ω）')
@click.option('--dt', type=float, help='晶格模拟步长')
@click.option('--config', '-c', help='配置文件路径')
def validate(
    in_dir: str,
    checks: str,
    particles: Optional[int],
    t_end: Optional[float],
    dt: Optional[float],
    config: Optional[str],
):
    """验证已保存的波列，打印通过/失败表"""
    settings = _load_settings(config)
    logger = get_logger("cli")

    selected = [c.strip() for c in checks.split(",") if c.strip()]
    unknown = [c for c in selected if c not in CHECKS]
    if unknown or not selected:
        _fail(f"unknown check(s) {', '.join(unknown) or '(none)'}; expected {', '.join(CHECKS)}")

    try:
        w = ResultStore(in_dir, settings).read_wave_train()
        rows = _run_checks(w, selected, settings, particles, t_end, dt)
    except WaveTrainError as e:
        _fail(str(e))

    _echo_banner("KG WAVE TRAINS - VALIDATION")
    click.echo("")
    for name, ok, detail in rows:
        status = "PASS" if ok else "FAIL"
        click.echo(f"  {name:<10} {status}  {detail}")
        if ok:
            logger.info(f"Check {name} passed: {detail}")
        else:
            logger.warning(f"Check {name} failed: {detail}")
    click.echo("\n" + "=" * 60 + "\n")

    if not all(ok for _, ok, _ in rows):
        raise SystemExit(EXIT_INVALID)


@cli.command()
def presets():
    """列出预设实验"""
    _echo_banner("KG WAVE TRAINS - PRESETS")
    for name in sorted(PRESETS):
        preset = PRESETS[name]
        click.echo(f"\n{name}: {preset.description}")
        click.echo(f"  gammas:    {', '.join(f'{g:g}' for g in preset.gammas)}")
        click.echo(f"  ks:        {', '.join(f'{k:g}' for k in preset.ks)}")
        click.echo(f"  potential: {preset.potential}")
        click.echo(f"  N:         {preset.n}")
        click.echo(f"  nesting:   {preset.check_nesting}")
    click.echo("\n" + "=" * 60 + "\n")


@cli.command()
@click.option('--config', '-c', help='配置文件路径')
@click.option('--save', type=click.Path(dir_okay=False), help='把生效的配置写入该文件')
def config(config: Optional[str], save: Optional[str]):
    """显示当前配置"""
    settings = _load_settings(config)

    _echo_banner("KG WAVE TRAINS - CONFIGURATION")
    click.echo("")
    values: Dict[str, object] = settings.model_dump()
    width = max(len(key) for key in values)
    for key, value in values.items():
        click.echo(f"{key:<{width}}  {value}")
    click.echo("\n" + "=" * 60 + "\n")

    if save:
        try:
            settings.save(Path(save))
        except OSError as e:
            _fail(f"Failed to save configuration: {e}")
        click.echo(f"Configuration saved: {Path(save).absolute()}")


if __name__ == '__main__':
    cli()
