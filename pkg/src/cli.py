#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
命令行模块
提供 eval、trace、store-nf、store-eq、subtype、typecheck、certify、search、member、proptest 命令

退出码: 0 成功/真/收敛，1 假/阻塞/未找到，2 燃料或预算耗尽，3 输入错误
"""

import functools
import json
import logging
import sys
from dataclasses import dataclass

import click

from src import __version__
from src.concrete_syntax import (
    parse_configuration, parse_context, parse_derivation, parse_store, parse_term, parse_type,
)
from src.config_manager import ConfigManager
from src.derivation import check_derivation
from src.errors import InternalDerivationError, LambdaImpError, OpenTermError, SortMismatch
from src.log_manager import LogManager
from src.operational import Blocked, Configuration, Converged, eval_big, run
from src.printer import (
    derivation_to_dict, render, render_configuration, render_derivation, render_store, trace_records,
)
from src.proptest import SUITES, PropertyTestRunner
from src.realizability import NO, UNKNOWN, YES, Budget, member
from src.store import normal_form, rewrite_oracle, store_eq
from src.subtype_oracle import subtype_oracle
from src.syntax import free_vars, is_value
from src.type_assignment import Certificate, certify_convergence, search_typing, search_value
from src.type_language import COMPUTATION, STORE, VALUE, sort_of, subtype

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_EXHAUSTED = 2
EXIT_INPUT = 3

_VERDICT_EXIT = {YES: EXIT_OK, NO: EXIT_FALSE, UNKNOWN: EXIT_EXHAUSTED}


@dataclass
class Settings:
    """命令共享的配置与渲染选项"""
    config_manager: ConfigManager
    unicode: bool = False

    @property
    def config(self):
        return self.config_manager.get_config()

    def fuel(self, override=None):
        return override if override is not None else self.config_manager.get_fuel()

    def budget(self, samples=None, fuel=None, size=None) -> Budget:
        budget = self.config['budget']
        return Budget(
            max_samples=samples if samples is not None else budget['max_samples'],
            fuel=fuel if fuel is not None else budget['fuel'],
            max_term_size=size if size is not None else budget['max_term_size'],
        )


class LambdaImpGroup(click.Group):
    """把 click 的异常与命令的返回值统一换算为退出码"""

    def main(self, args=None, prog_name=None, **extra):
        extra.pop('standalone_mode', None)
        try:
            code = super().main(args=args, prog_name=prog_name, standalone_mode=False, **extra)
        except click.exceptions.Exit as e:
            code = e.exit_code
        except click.ClickException as e:
            e.show()
            code = EXIT_INPUT
        except click.Abort:
            click.echo("已中止", err=True)
            code = EXIT_INPUT
        sys.exit(code if isinstance(code, int) else EXIT_OK)


def _input_errors(func):
    """输入中的语法、良构性与种类错误以退出码 3 报告"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except InternalDerivationError:
            raise
        except (LambdaImpError, ValueError) as e:
            logger.error(f"输入错误: {str(e)}")
            click.echo(f"错误: {e}", err=True)
            return EXIT_INPUT

    return wrapper


def _echo_json(data):
    click.echo(json.dumps(data, ensure_ascii=False, indent=2))


def _read_text(path):
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def _outcome_name(outcome):
    if isinstance(outcome, Converged):
        return 'converged'
    if isinstance(outcome, Blocked):
        return 'blocked'
    return 'fuel exhausted'


def _outcome_exit(outcome):
    if isinstance(outcome, Converged):
        return EXIT_OK
    if isinstance(outcome, Blocked):
        return EXIT_FALSE
    return EXIT_EXHAUSTED


def _outcome_dict(outcome, unicode):
    data = {'outcome': _outcome_name(outcome), 'steps': outcome.steps}
    if isinstance(outcome, Converged):
        data['value'] = render(outcome.value, unicode)
        data['store'] = render_store(outcome.store, unicode)
        data['index'] = outcome.index
    else:
        data['configuration'] = render_configuration(outcome.configuration, unicode)
    return data


def _outcome_lines(outcome, unicode):
    lines = [_outcome_name(outcome)]
    if isinstance(outcome, Converged):
        lines.append(f"value: {render(outcome.value, unicode)}")
        lines.append(f"store: {render_store(outcome.store, unicode)}")
    else:
        lines.append(f"configuration: {render_configuration(outcome.configuration, unicode)}")
    lines.append(f"steps: {outcome.steps}")
    return lines


def _configuration(program, store_text):
    computation = parse_term(program)
    if is_value(computation):
        raise SortMismatch("只能运行计算，不能运行值")
    return Configuration(computation, parse_store(store_text))


def _parse_entity(text, sort):
    if sort in (VALUE, COMPUTATION):
        entity = parse_term(text)
        if (sort == VALUE) != is_value(entity):
            raise SortMismatch(f"{render(entity)} 的种类与类型不符")
        return entity
    if sort == STORE:
        return parse_store(text)
    return parse_configuration(text)


# ---- 命令组 ----

@click.group(cls=LambdaImpGroup)
@click.option('--config', 'config_file', type=click.Path(dir_okay=False), default=None,
              help='配置文件路径，默认为仓库根目录下的 config.json')
@click.option('--unicode/--ascii', default=None, help='用 λ、⟫=、∧、×、ω 渲染输出')
@click.version_option(__version__, prog_name='lambda-imp')
@click.pass_context
def cli(ctx, config_file, unicode):
    """λimp 工具包：求值、存储代数、交类型推导与可实现性检查"""
    config_manager = ConfigManager(config_file)
    valid, message = config_manager.validate_config()
    if not valid:
        raise click.UsageError(f"配置无效: {message}")
    # 由程序入口传入的日志配置函数
    if callable(ctx.obj):
        ctx.obj(config_manager)
    if unicode is None:
        unicode = bool(config_manager.get_config()['unicode'])
    ctx.obj = Settings(config_manager, unicode)


# ---- 运行 ----

@cli.command('eval')
@click.argument('program', required=False)
@click.option('--fuel', type=click.IntRange(min=1), default=None, help='归约步数上限')
@click.option('--store', 'store_text', default='emp', show_default=True, help='初始存储项')
@click.option('--big', is_flag=True, help='使用大步求值器')
@click.option('--json', 'as_json', is_flag=True, help='以 JSON 输出')
@click.option('--batch', type=click.Path(exists=True, dir_okay=False), help='逐行读取程序的文件')
@click.pass_obj
@_input_errors
def eval_command(settings, program, fuel, store_text, big, as_json, batch):
    """在给定存储上运行程序"""
    if (program is None) == (batch is None):
        raise click.UsageError("需要恰好一个 PROGRAM 或 --batch 文件")
    fuel = settings.fuel(fuel)
    if batch is None:
        programs = [program]
    else:
        programs = [line.strip() for line in _read_text(batch).splitlines()]
        programs = [line for line in programs if line and not line.startswith('#')]

    code = EXIT_OK
    records = []
    for index, text in enumerate(programs):
        configuration = _configuration(text, store_text)
        if big:
            outcome = eval_big(configuration, fuel)
        else:
            outcome, _ = run(configuration, fuel)
        code = max(code, _outcome_exit(outcome))
        if as_json:
            records.append(_outcome_dict(outcome, settings.unicode))
            continue
        if batch is not None:
            click.echo(f"--- {index + 1}")
        for line in _outcome_lines(outcome, settings.unicode):
            click.echo(line)

    if as_json:
        _echo_json(records if batch is not None else records[0])
    logger.info(f"eval 完成: {len(programs)} 个程序，退出码 {code}")
    return code


@cli.command('trace')
@click.argument('program')
@click.option('--fuel', type=click.IntRange(min=1), default=None, help='归约步数上限')
@click.option('--store', 'store_text', default='emp', show_default=True, help='初始存储项')
@click.option('--json', 'as_json', is_flag=True, help='以 JSON 输出')
@click.pass_obj
@_input_errors
def trace_command(settings, program, fuel, store_text, as_json):
    """逐步打印归约轨迹"""
    outcome, trace = run(_configuration(program, store_text), settings.fuel(fuel))
    if as_json:
        _echo_json({'outcome': _outcome_name(outcome), 'steps': trace_records(trace, settings.unicode)})
    else:
        for index, configuration in enumerate(trace):
            click.echo(f"step {index}: {render_configuration(configuration, settings.unicode)}")
        click.echo(_outcome_name(outcome))
    return _outcome_exit(outcome)


# ---- 存储代数 ----

@cli.command('store-nf')
@click.argument('store')
@click.pass_obj
@_input_errors
def store_nf_command(settings, store):
    """打印存储项的范式"""
    click.echo(render_store(normal_form(parse_store(store)), settings.unicode))
    return EXIT_OK


@cli.command('store-eq')
@click.argument('first')
@click.argument('second')
@click.option('--oracle-depth', type=click.IntRange(min=0), default=None,
              help='改用有界重写搜索判定，给出证明长度上界')
@click.pass_obj
@_input_errors
def store_eq_command(settings, first, second, oracle_depth):
    """判定两个存储项是否可证相等"""
    s, t = parse_store(first), parse_store(second)
    equal = store_eq(s, t) if oracle_depth is None else rewrite_oracle(s, t, oracle_depth)
    click.echo('true' if equal else 'false')
    return EXIT_OK if equal else EXIT_FALSE


# ---- 类型 ----

@cli.command('subtype')
@click.argument('phi')
@click.argument('psi')
@click.option('--oracle-depth', type=click.IntRange(min=0), default=None,
              help='改用有界公理推导搜索，给出推导高度上界')
@click.pass_obj
@_input_errors
def subtype_command(settings, phi, psi, oracle_depth):
    """判定 PHI ≤ PSI"""
    a, b = parse_type(phi), parse_type(psi)
    holds = subtype(a, b) if oracle_depth is None else subtype_oracle(a, b, oracle_depth)
    click.echo('true' if holds else 'false')
    return EXIT_OK if holds else EXIT_FALSE


@cli.command('typecheck')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
@_input_errors
def typecheck_command(settings, path):
    """检查推导文件"""
    result = check_derivation(parse_derivation(_read_text(path)))
    if result.ok:
        click.echo('ok')
        return EXIT_OK
    click.echo(f"error at {result.path_text()}: {result.reason}: {result.message}")
    return EXIT_FALSE


@cli.command('certify')
@click.argument('program')
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None, help='推导文件的输出路径')
@click.option('--fuel', type=click.IntRange(min=1), default=None, help='归约步数上限')
@click.option('--json', 'as_json', is_flag=True, help='以 JSON 输出推导')
@click.pass_obj
@_input_errors
def certify_command(settings, program, output, fuel, as_json):
    """为收敛的闭计算生成 ⊢ M : ωS → ωD × ωS 的推导"""
    computation = parse_term(program)
    if is_value(computation):
        raise SortMismatch("只能为计算生成收敛证书")
    certificate = certify_convergence(computation, settings.fuel(fuel))
    if not isinstance(certificate, Certificate):
        click.echo(_outcome_name(certificate.outcome))
        return _outcome_exit(certificate.outcome)

    if output is not None:
        # 文件总是 ASCII，以便 typecheck 读回
        with open(output, 'w', encoding='utf-8') as f:
            f.write(render_derivation(certificate.derivation) + '\n')
        click.echo(f"certificate written to {output}")
        click.echo(f"steps: {certificate.outcome.steps}")
    elif as_json:
        _echo_json(derivation_to_dict(certificate.derivation, settings.unicode))
    else:
        click.echo(render_derivation(certificate.derivation, settings.unicode))
    return EXIT_OK


@cli.command('search')
@click.argument('program')
@click.argument('type_text', metavar='TYPE')
@click.option('--depth', type=click.IntRange(min=1), default=None, help='搜索深度')
@click.option('--context', 'context_text', default='', help='类型上下文，如 "x : wD, y : wD"')
@click.option('--json', 'as_json', is_flag=True, help='以 JSON 输出推导')
@click.pass_obj
@_input_errors
def search_command(settings, program, type_text, depth, context_text, as_json):
    """有界搜索 Γ ⊢ PROGRAM : TYPE 的推导"""
    term = parse_term(program)
    target = parse_type(type_text)
    context = parse_context(context_text)
    if not context.is_valid():
        raise SortMismatch("上下文中变量重复")
    depth = depth or settings.config['search_depth']
    expected = VALUE if is_value(term) else COMPUTATION
    if sort_of(target) != expected:
        raise SortMismatch(f"类型的种类 {sort_of(target)} 与项的种类 {expected} 不同")
    unbound = free_vars(term) - context.names()
    if unbound:
        raise OpenTermError(unbound)

    if expected == VALUE:
        found = search_value(context, term, target, depth)
    else:
        found = search_typing(context, term, target, depth)
    if found is None:
        click.echo('not found')
        return EXIT_FALSE
    if as_json:
        _echo_json(derivation_to_dict(found, settings.unicode))
    else:
        click.echo(render_derivation(found, settings.unicode))
    return EXIT_OK


# ---- 可实现性 ----

@cli.command('member')
@click.argument('entity_text', metavar='ENTITY')
@click.argument('type_text', metavar='TYPE')
@click.option('--budget', 'samples', type=click.IntRange(min=1), default=None, help='每个量词的采样数')
@click.option('--budget-fuel', type=click.IntRange(min=1), default=None, help='每次运行的燃料')
@click.option('--max-size', type=click.IntRange(min=1), default=None, help='枚举值的大小上界')
@click.option('--seed', type=int, default=None, help='随机种子')
@click.option('--json', 'as_json', is_flag=True, help='以 JSON 输出判定')
@click.pass_obj
@_input_errors
def member_command(settings, entity_text, type_text, samples, budget_fuel, max_size, seed, as_json):
    """在预算内检查 ENTITY ∈ ⟦TYPE⟧；结果种类的类型对应格局 (M, s)"""
    phi = parse_type(type_text)
    sort = sort_of(phi)
    entity = _parse_entity(entity_text, sort)
    seed = settings.config['seed'] if seed is None else seed
    verdict = member(entity, phi, settings.budget(samples, budget_fuel, max_size), seed)
    if as_json:
        _echo_json(verdict.to_dict())
    else:
        click.echo(verdict.kind if verdict.exhaustive else f"{verdict.kind} (sampled)")
        if verdict.witness is not None:
            for key, value in verdict.witness.to_dict().items():
                click.echo(f"{key}: {value}")
    logger.info(f"成员检查完成: {verdict.kind}")
    return _VERDICT_EXIT[verdict.kind]


# ---- 性质测试 ----

@cli.command('proptest')
@click.option('--suite', 'suites', type=click.Choice(SUITES), multiple=True, help='只运行指定的套件，可重复')
@click.option('--scale', type=click.FloatRange(min=0.0, min_open=True), default=1.0, show_default=True,
              help='用例数量的缩放系数')
@click.option('--seed', type=int, default=None, help='随机种子')
@click.option('--log-out', type=click.Path(dir_okay=False), default=None, help='导出逐例日志的路径')
@click.option('--only-failures', is_flag=True, help='日志只导出失败的用例')
@click.pass_obj
@_input_errors
def proptest_command(settings, suites, scale, seed, log_out, only_failures):
    """运行验收性质测试"""
    seed = settings.config['seed'] if seed is None else seed
    log_manager = LogManager()
    runner = PropertyTestRunner(
        seed=seed,
        scale=scale,
        log_manager=log_manager,
        budget=settings.budget(),
        oracle_depth=settings.config['oracle_depth'],
        search_depth=settings.config['search_depth'],
    )
    reports = runner.run(suites or SUITES)
    for report in reports:
        status = 'ok' if report.passed else 'FAILED'
        click.echo(f"{report.name}: {report.cases} cases, {report.failures} failures ... {status}")
        for message in report.messages[:5]:
            click.echo(f"  {message}")
    if log_out:
        success, message = log_manager.export_logs(log_out, only_failures)
        if not success:
            click.echo(message, err=True)
    return EXIT_OK if all(report.passed for report in reports) else EXIT_FALSE


if __name__ == "__main__":
    cli(prog_name='lambda-imp')
