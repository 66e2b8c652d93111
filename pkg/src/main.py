#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
λimp 工具包主程序
负责配置日志并启动命令行
"""

import logging

from src.cli import cli
from src.config_manager import ConfigManager

logger = logging.getLogger(__name__)


def setup_logging(config_manager=None):
    """按配置把日志同时写到标准错误和日志文件"""
    config = (config_manager or ConfigManager()).get_config()
    logging.basicConfig(
        level=getattr(logging, config.get('log_level', 'INFO'), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(config.get('log_file', 'lambda_imp.log'), encoding='utf-8')
        ],
        force=True,
    )


def main(argv=None):
    """程序入口函数；日志在命令组读入 --config 指定的配置后配置"""
    try:
        cli.main(args=argv, prog_name='lambda-imp', obj=setup_logging)
    except SystemExit:
        raise
    except Exception as e:
        logger.error(f"程序运行出错: {str(e)}")
        raise


if __name__ == "__main__":
    main()
