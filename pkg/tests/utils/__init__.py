"""
测试工具模块

提供测试辅助工具和实用函数。
"""