CLI_CONFIG = {
    # Config resolution: --config, then this env var, then built-in defaults
    "config_envvar": "G2MODULI_CONFIG",
    # Default artefact names
    "metric_csv": "metric.csv",
    "trajectory_csv": "traj.csv",
    "scan_json": "scan.json",
    "verify_json": "verify_report.json",
    # Rows shown in terminal previews
    "preview_rows": 12,
    # Exit codes
    "exit_ok": 0,
    "exit_check_failed": 1,
    "exit_usage": 2,
}
