#!/usr/bin/env python3
"""
宇称测量干涉仪数值工具 - 命令行入口

使用方法:
    python main.py parity --family twin-fock --n 15
    python main.py verify --max-n 12

或者查看全部子命令:
    python main.py --help
"""

import sys
from pathlib import Path

# 添加项目路径到 sys.path
project_root = Path(__file__).resolve().parent
sys.path.insert(0, str(project_root))

from src.parity_interferometry.cli import main


if __name__ == "__main__":
    sys.exit(main())
