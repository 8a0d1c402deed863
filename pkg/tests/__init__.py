"""
测试套件
"""
