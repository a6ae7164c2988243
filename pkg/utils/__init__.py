"""
Utils package for console output and result files
"""
from .console import console, setup_logging, show_agent_working, show_checks, show_stage
from .exporters import results_path, write_csv, write_json, write_jsonl

__all__ = [
    'console', 'setup_logging', 'show_agent_working', 'show_checks', 'show_stage',
    'results_path', 'write_csv', 'write_json', 'write_jsonl',
]
