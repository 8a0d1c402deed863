#!/usr/bin/env python3
"""
KG Wave Trains - 主入口
"""
from kg_wavetrains.cli import cli

if __name__ == '__main__':
    cli()
