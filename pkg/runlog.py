"""
TauSet - Run log
One sqlite row per command invocation, with JSON parameter and stats
payloads. Logging can be paused through the settings table.
"""

import json
import logging
import sqlite3
from datetime import datetime

import pytz

import config

logger = logging.getLogger(__name__)


def get_db_connection():
    conn = sqlite3.connect(config.RUNLOG_DB_PATH)
    conn.row_factory = sqlite3.Row
    return conn


def init_runlog():
    conn = get_db_connection()
    try:
        cursor = conn.cursor()

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                command TEXT NOT NULL,
                status TEXT NOT NULL,
                params TEXT,
                stats TEXT,
                details TEXT,
                started_at TEXT NOT NULL
            )
        ''')

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS settings (
                key TEXT PRIMARY KEY,
                value TEXT NOT NULL,
                updated_at TEXT
            )
        ''')

        cursor.execute("SELECT COUNT(*) FROM settings WHERE key = 'logging_enabled'")
        if cursor.fetchone()[0] == 0:
            cursor.execute(
                "INSERT INTO settings (key, value, updated_at) VALUES (?, ?, ?)",
                ('logging_enabled', '1' if config.RUNLOG_ENABLED else '0', utc_now())
            )

        conn.commit()
    finally:
        conn.close()


def utc_now():
    return datetime.now(pytz.utc).isoformat()


# =============================================================================
# SETTINGS
# =============================================================================

def get_setting(key, default=None):
    conn = None
    try:
        conn = get_db_connection()
        cursor = conn.cursor()
        cursor.execute("SELECT value FROM settings WHERE key = ?", (key,))
        row = cursor.fetchone()
        return row['value'] if row else default
    except sqlite3.Error:
        return default
    finally:
        if conn:
            conn.close()


def set_setting(key, value):
    """
    Insert or update a setting.

    Returns:
        (success, message)
    """
    conn = None
    try:
        init_runlog()
        conn = get_db_connection()
        cursor = conn.cursor()
        cursor.execute("""
            INSERT INTO settings (key, value, updated_at)
            VALUES (?, ?, ?)
            ON CONFLICT(key) DO UPDATE SET
                value = excluded.value,
                updated_at = excluded.updated_at
        """, (key, value, utc_now()))
        conn.commit()
        return True, "Setting updated"
    except Exception as e:
        return False, str(e)
    finally:
        if conn:
            conn.close()


def is_logging_enabled():
    """Check if run logging is enabled."""
    if not config.RUNLOG_ENABLED:
        return False
    return get_setting('logging_enabled', '1') == '1'


def set_logging_enabled(enabled):
    return set_setting('logging_enabled', '1' if enabled else '0')


# =============================================================================
# RUN RECORDS
# =============================================================================

def log_run(command, status, params=None, stats=None, details=None):
    """
    Record one command invocation.

    Args:
        command: Command name (build-partition, lce, sst, verify, gen)
        status: 'ok', 'failed' or 'error'
        params: Dict of resolved parameters (optional)
        stats: Dict of run statistics (optional)
        details: Human-readable summary (optional)

    Returns:
        (success, run_id or error_message)
    """
    if not is_logging_enabled():
        return True, None

    conn = None
    try:
        init_runlog()
        conn = get_db_connection()
        cursor = conn.cursor()

        cursor.execute("""
            INSERT INTO runs (command, status, params, stats, details, started_at)
            VALUES (?, ?, ?, ?, ?, ?)
        """, (
            command,
            status,
            json.dumps(params) if params else None,
            json.dumps(stats) if stats else None,
            details,
            utc_now()
        ))

        conn.commit()
        return True, cursor.lastrowid
    except Exception as e:
        logger.warning("run log unavailable: %s", e)
        return False, str(e)
    finally:
        if conn:
            conn.close()


def get_runs(command=None, status=None, limit=20):
    """
    Most recent runs first.

    Returns:
        List of dicts with params and stats decoded
    """
    conn = None
    try:
        init_runlog()
        conn = get_db_connection()
        cursor = conn.cursor()

        query = "SELECT * FROM runs WHERE 1=1"
        args = []
        if command:
            query += " AND command = ?"
            args.append(command)
        if status:
            query += " AND status = ?"
            args.append(status)
        query += " ORDER BY id DESC LIMIT ?"
        args.append(limit)

        cursor.execute(query, args)
        rows = cursor.fetchall()

        result = []
        for row in rows:
            record = dict(row)
            for key in ('params', 'stats'):
                if record.get(key):
                    try:
                        record[key] = json.loads(record[key])
                    except ValueError:
                        pass
            result.append(record)
        return result
    except Exception as e:
        logger.warning("could not read run log: %s", e)
        return []
    finally:
        if conn:
            conn.close()


def get_run_stats():
    """Totals by command and by status."""
    conn = None
    try:
        init_runlog()
        conn = get_db_connection()
        cursor = conn.cursor()

        cursor.execute("""
            SELECT command, COUNT(*) as count
            FROM runs
            GROUP BY command
            ORDER BY command
        """)
        by_command = {row['command']: row['count'] for row in cursor.fetchall()}

        cursor.execute("""
            SELECT status, COUNT(*) as count
            FROM runs
            GROUP BY status
            ORDER BY status
        """)
        by_status = {row['status']: row['count'] for row in cursor.fetchall()}

        cursor.execute("SELECT COUNT(*) as total FROM runs")
        total = cursor.fetchone()['total']

        return {
            'total': total,
            'by_command': by_command,
            'by_status': by_status,
        }
    except Exception as e:
        logger.warning("could not read run log stats: %s", e)
        return {}
    finally:
        if conn:
            conn.close()
