#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
配置管理模块
负责燃料、搜索深度、可实现性预算等运行参数的保存和读取
"""

import copy
import json
import os
import logging

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

FUEL_ENV = 'LAMBDA_IMP_FUEL'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


class ConfigManager:
    """配置管理类，负责运行参数的保存和读取"""

    def __init__(self, config_file=None):
        """
        初始化配置管理器

        Args:
            config_file: 配置文件路径，默认为程序所在目录下的config.json
        """
        if config_file is None:
            # 获取程序所在目录
            base_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
            self.config_file = os.path.join(base_dir, 'config.json')
        else:
            self.config_file = config_file

        # 默认配置
        self.default_config = {
            'fuel': 10000,
            'search_depth': 6,
            'oracle_depth': 8,
            'budget': {
                'max_samples': 50,
                'fuel': 500,
                'max_term_size': 8,
            },
            'seed': 0,
            'unicode': False,
            'log_file': 'lambda_imp.log',
            'log_level': 'INFO',
        }

        # 当前配置
        self.config = self.load_config()

    def load_config(self):
        """
        加载配置文件，缺少的配置项用默认值补齐

        Returns:
            dict: 配置信息字典
        """
        config = copy.deepcopy(self.default_config)
        try:
            if os.path.exists(self.config_file):
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    loaded = json.load(f)
                budget = {**config['budget'], **loaded.get('budget', {})}
                config.update(loaded)
                config['budget'] = budget
                logger.info(f"成功从 {self.config_file} 加载配置")
            else:
                logger.info(f"配置文件 {self.config_file} 不存在，使用默认配置")
        except Exception as e:
            logger.error(f"加载配置文件失败: {str(e)}")
            config = copy.deepcopy(self.default_config)
        return config

    def save_config(self, config=None):
        """
        保存配置到文件

        Args:
            config: 要保存的配置，默认为当前配置

        Returns:
            bool: 保存是否成功
        """
        if config is None:
            config = self.config

        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(config, f, ensure_ascii=False, indent=4)
            logger.info(f"成功保存配置到 {self.config_file}")
            return True
        except Exception as e:
            logger.error(f"保存配置文件失败: {str(e)}")
            return False

    def update_config(self, new_config):
        """
        更新配置

        Args:
            new_config: 新的配置信息，budget 按键合并

        Returns:
            bool: 更新是否成功
        """
        try:
            budget = {**self.config['budget'], **new_config.get('budget', {})}
            self.config.update(new_config)
            self.config['budget'] = budget
            return self.save_config()
        except Exception as e:
            logger.error(f"更新配置失败: {str(e)}")
            return False

    def get_config(self):
        """
        获取当前配置

        Returns:
            dict: 当前配置信息
        """
        return self.config

    def get_fuel(self):
        """默认燃料，环境变量 LAMBDA_IMP_FUEL 优先"""
        value = os.environ.get(FUEL_ENV)
        if value:
            try:
                fuel = int(value)
                if fuel > 0:
                    return fuel
            except ValueError:
                pass
            logger.warning(f"忽略无效的 {FUEL_ENV}: {value}")
        return self.config['fuel']

    def reset_config(self):
        """
        重置为默认配置

        Returns:
            bool: 重置是否成功
        """
        self.config = copy.deepcopy(self.default_config)
        return self.save_config()

    def validate_config(self):
        """
        验证配置是否有效

        Returns:
            tuple: (是否有效, 错误信息)
        """
        for field in ('fuel', 'search_depth', 'oracle_depth'):
            value = self.config.get(field)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                return False, f"配置项 {field} 必须是正整数"

        budget = self.config.get('budget')
        if not isinstance(budget, dict):
            return False, "缺少必要的配置项: budget"
        for field in ('max_samples', 'fuel', 'max_term_size'):
            value = budget.get(field)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                return False, f"预算项 budget.{field} 必须是正整数"

        if not isinstance(self.config.get('seed'), int):
            return False, "配置项 seed 必须是整数"

        if self.config.get('log_level') not in LOG_LEVELS:
            return False, f"日志级别必须是 {', '.join(LOG_LEVELS)} 之一"

        return True, ""


# 测试代码
if __name__ == "__main__":
    config_manager = ConfigManager()
    print(config_manager.get_config())
    valid, msg = config_manager.validate_config()
    print(f"配置有效性: {valid}, 消息: {msg}")
