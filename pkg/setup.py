#!/usr/bin/env python
"""
Setup script for kg-wavetrains
支持 editable 模式安装
"""
from setuptools import setup

if __name__ == "__main__":
    setup()
