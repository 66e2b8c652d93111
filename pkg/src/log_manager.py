#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
日志管理模块
负责记录和导出性质测试的逐例结果
"""

import logging
import datetime

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


class LogManager:
    """日志管理类，负责记录和导出性质测试日志"""

    def __init__(self):
        """初始化日志管理器"""
        self.logs = []
        self.failure_count = 0
        self.total_count = 0
        self.start_time = None
        self.end_time = None
        self.suites = []

    def start_logging(self):
        """开始记录日志"""
        self.logs = []
        self.failure_count = 0
        self.total_count = 0
        self.suites = []
        self.start_time = datetime.datetime.now()
        logger.info("开始记录性质测试日志")

    def log_case(self, suite, case, passed=True, detail=''):
        """
        记录一个测试用例

        Args:
            suite: 测试套件名
            case: 用例的文字描述
            passed: 是否通过
            detail: 失败时的说明

        Returns:
            str: 日志文本
        """
        self.total_count += 1
        if suite not in self.suites:
            self.suites.append(suite)
        log_entry = {
            'time': datetime.datetime.now(),
            'suite': suite,
            'case': case,
            'passed': passed,
            'detail': detail,
        }
        self.logs.append(log_entry)

        if passed:
            log_text = f"[{suite}] {case}: 通过"
            logger.debug(log_text)
        else:
            self.failure_count += 1
            log_text = f"[{suite}] {case}: 失败 {detail}"
            logger.warning(log_text)
        return log_text

    def log_error(self, suite, case, error_message):
        """
        记录用例执行中的异常

        Args:
            suite: 测试套件名
            case: 用例的文字描述
            error_message: 错误信息
        """
        self.total_count += 1
        self.failure_count += 1
        log_entry = {
            'time': datetime.datetime.now(),
            'suite': suite,
            'case': case,
            'passed': False,
            'is_process_error': True,
            'detail': error_message,
        }
        log_text = f"[{suite}] {case}: 执行错误 {error_message}"
        self.logs.append(log_entry)
        logger.error(log_text)
        return log_text

    def finish_logging(self):
        """
        完成日志记录

        Returns:
            str: 日志摘要
        """
        self.end_time = datetime.datetime.now()
        duration = (self.end_time - self.start_time).total_seconds() if self.start_time else 0.0
        summary = "性质测试完成！\n"
        summary += f"测试套件: {', '.join(self.suites)}\n"
        summary += f"用例总数: {self.total_count}\n"
        summary += f"失败数量: {self.failure_count}\n"
        summary += f"测试用时: {duration:.2f} 秒\n"
        logger.info(summary)
        return summary

    def export_logs(self, output_path, only_failures=False):
        """
        导出日志到文本文件

        Args:
            output_path: 输出文件路径
            only_failures: 是否只导出失败的用例

        Returns:
            tuple: (是否成功, 输出路径或错误信息)
        """
        try:
            with open(output_path, 'w', encoding='utf-8') as f:
                f.write("λimp 工具包 - 性质测试日志\n")
                f.write("=" * 50 + "\n\n")

                if self.start_time:
                    f.write(f"开始时间: {self.start_time.strftime('%Y-%m-%d %H:%M:%S')}\n")
                else:
                    f.write("开始时间: 未记录\n")

                if self.end_time:
                    f.write(f"结束时间: {self.end_time.strftime('%Y-%m-%d %H:%M:%S')}\n")
                else:
                    f.write("结束时间: 未记录\n")

                if self.start_time and self.end_time:
                    f.write(f"测试用时: {(self.end_time - self.start_time).total_seconds():.2f} 秒\n")
                else:
                    f.write("测试用时: 未记录\n")
                f.write(f"用例总数: {self.total_count}\n")
                f.write(f"失败数量: {self.failure_count}\n")

                f.write("\n" + "=" * 50 + "\n\n")
                f.write("用例详情:\n\n")

                for i, log in enumerate(self.logs):
                    if only_failures and log['passed']:
                        continue

                    f.write(f"[{i+1}/{len(self.logs)}] {log['time'].strftime('%H:%M:%S')} {log['suite']}\n")
                    f.write(f"用例: {log['case']}\n")

                    if log.get('is_process_error', False):
                        f.write(f"执行错误: {log['detail']}\n")
                    elif not log['passed']:
                        f.write(f"失败: {log['detail']}\n")
                    else:
                        f.write("通过\n")

                    f.write("\n" + "-" * 30 + "\n\n")

            logger.info(f"成功导出日志到: {output_path}")
            return True, output_path

        except Exception as e:
            logger.error(f"导出日志失败: {str(e)}")
            return False, f"导出日志失败: {str(e)}"

    def get_log_summary(self):
        """
        获取日志摘要

        Returns:
            dict: 日志摘要信息
        """
        return {
            'total_count': self.total_count,
            'failure_count': self.failure_count,
            'suites': list(self.suites),
            'start_time': self.start_time,
            'end_time': self.end_time,
            'duration': (self.end_time - self.start_time).total_seconds() if self.end_time else None,
        }
