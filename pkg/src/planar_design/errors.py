"""Error type shared by all modules.

Every failure carries a stable string code so the CLI can map it to an exit
status and tests can assert on it without matching messages.
"""

EULER_VIOLATION = "EULER_VIOLATION"
MALFORMED_ROTATION = "MALFORMED_ROTATION"
DISCONNECTED = "DISCONNECTED"
MIN_CUT_MISMATCH = "MIN_CUT_MISMATCH"
ORACLE_TOO_LARGE = "ORACLE_TOO_LARGE"
INVALID_DELTA = "INVALID_DELTA"
U_NOT_PROPER = "U_NOT_PROPER"
INFEASIBLE = "INFEASIBLE"
INVALID_EPSILON = "INVALID_EPSILON"
K_TOO_LARGE = "K_TOO_LARGE"
PIECE_INFEASIBLE = "PIECE_INFEASIBLE"
NOT_MINIMAL = "NOT_MINIMAL"
NOT_K_CONNECTED = "NOT_K_CONNECTED"
INVALID_DECOMPOSITION = "INVALID_DECOMPOSITION"
SAT_MALFORMED = "SAT_MALFORMED"
PARSE_ERROR = "PARSE_ERROR"


class DesignError(Exception):
    def __init__(self, code, message=""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message
