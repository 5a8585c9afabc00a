"""
性能测试模块

证明、验证与抽取的耗时检查。
"""
