import os

from dotenv import load_dotenv

# Variabili da un eventuale file .env nella directory corrente
load_dotenv()


class Config:
    # Configurazione di base
    APP_NAME = 'fockbundle'

    # Tolleranze numeriche (sovrascrivibili con --tol KEY=VAL)
    TOLERANCES = {
        'unitary': 1e-10,
        'alpha': 1e-10,
        'frame': 1e-10,
        'membership': 1e-10,
        'lagrangian': 1e-10,
        'isotropy': 1e-8,
        'car': 1e-9,
        'implements': 1e-8,
        'cocycle': 1e-8,
        'lie': 1e-10,
        'gerbe': 1e-8,
        'trivialize': 1e-6,
        'dirac_residual': 1e-4,
        'dirac_inclusion': 1e-6,
        'orthogonality': 1e-8,
        'kernel': 1e-8,
        'capture': 1e-10,
    }

    # Limite dello spazio di Fock: 2^16 = 65536
    MAX_FOCK_DIM = 65536

    # Diagnostica di equivalenza
    DIVERGENCE_FACTOR = 1.5
    DIVERGENCE_FLOOR = 1e-9

    # Trasporto parallelo
    RK4_MIN_STEPS = 64
    RK4_REORTHONORMALIZE = 16
    RK4_DRIFT = 1e-6

    # Margine di modi per le autofunzioni di Dirac
    DIRAC_MARGIN = 6

    # Logging
    LOG_LEVEL = os.environ.get('FOCKBUNDLE_LOG_LEVEL') or 'WARNING'
    LOG_DIR = os.environ.get('FOCKBUNDLE_LOG_DIR') or None

    @classmethod
    def tolerance(cls, key):
        """Return a default tolerance by name."""
        return cls.TOLERANCES[key]

    @classmethod
    def max_fock_dim(cls):
        """Fock guard, read from the environment at call time."""
        value = os.environ.get('FOCKBUNDLE_MAX_FOCK_DIM')
        return int(value) if value else cls.MAX_FOCK_DIM

    @classmethod
    def as_dict(cls):
        """Defaults in the nested layout used by ConfigManager."""
        return {
            'app': {'name': cls.APP_NAME},
            'tolerances': dict(cls.TOLERANCES),
            'fock': {'max_dim': cls.MAX_FOCK_DIM},
            'diagnostics': {
                'divergence_factor': cls.DIVERGENCE_FACTOR,
                'divergence_floor': cls.DIVERGENCE_FLOOR,
            },
            'transport': {
                'min_steps': cls.RK4_MIN_STEPS,
                'reorthonormalize': cls.RK4_REORTHONORMALIZE,
                'drift': cls.RK4_DRIFT,
            },
            'dirac': {'margin': cls.DIRAC_MARGIN},
            'logging': {'level': cls.LOG_LEVEL, 'dir': cls.LOG_DIR},
        }
