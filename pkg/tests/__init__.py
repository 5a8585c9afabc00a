"""pshuf 测试包"""
