import numpy as np
import pandas as pd


def to_plain(value):
    """Convert numpy scalars, arrays, tuples and complex numbers to JSON-ready values."""
    if isinstance(value, dict):
        return {str(key): to_plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_plain(item) for item in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return str(complex(value))
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def split_complex(table):
    """Replace every complex column c by c_re and c_im in the same position."""
    columns = {}
    for name in table.columns:
        values = table[name].to_numpy()
        if np.iscomplexobj(values) or (values.dtype == object and any(isinstance(v, complex) for v in values)):
            values = values.astype(complex)
            columns[f'{name}_re'] = values.real
            columns[f'{name}_im'] = values.imag
        else:
            columns[name] = table[name]
    return pd.DataFrame(columns, index=table.index)
