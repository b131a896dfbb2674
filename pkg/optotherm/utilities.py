#!/usr/bin/env python
u"""
utilities.py
Written by the optotherm developers (10/2026)
File, hashing and argument utilities

UPDATE HISTORY:
    Updated 10/2026: added sha256 option for configuration digests
        thread count from the OPTOTHERM_THREADS environment variable
    Written 08/2026
"""
import os
import re
import io
import hashlib
import inspect
import logging

# PURPOSE: get absolute path within a package from a relative path
def get_data_path(relpath):
    """
    Get the absolute path within a package from a relative path

    Parameters
    ----------
    relpath: str,
        relative path
    """
    # current file path
    filename = inspect.getframeinfo(inspect.currentframe()).filename
    filepath = os.path.dirname(os.path.abspath(filename))
    if isinstance(relpath,list):
        # use *splat operator to extract from list
        return os.path.join(filepath,*relpath)
    elif isinstance(relpath,str):
        return os.path.join(filepath,relpath)

# PURPOSE: get the hash value of a file
def get_hash(local, algorithm='sha256'):
    """
    Get the hash value from a local file, bytes or BytesIO object

    Parameters
    ----------
    local: obj, bytes or str
        BytesIO object, bytes or path to file
    algorithm: str, default 'sha256'
        hashing algorithm for checksum validation

            - ``'MD5'``: Message Digest
            - ``'sha1'``: Secure Hash Algorithm
            - ``'sha256'``: Secure Hash Algorithm 2
    """
    constructors = dict(MD5=hashlib.md5, sha1=hashlib.sha1,
        sha256=hashlib.sha256)
    if algorithm not in constructors:
        raise ValueError(f'Unknown hash algorithm {algorithm}')
    if isinstance(local, bytes):
        return constructors[algorithm](local).hexdigest()
    elif isinstance(local, io.IOBase):
        return constructors[algorithm](local.getvalue()).hexdigest()
    elif os.access(os.path.expanduser(local),os.F_OK):
        with open(os.path.expanduser(local), 'rb') as local_buffer:
            return constructors[algorithm](local_buffer.read()).hexdigest()
    else:
        return ''

# PURPOSE: read arguments from a file with comments
def convert_arg_line_to_args(arg_line):
    """
    Convert file lines to arguments

    Parameters
    ----------
    arg_line: str
        line string containing a single argument and/or comments
    """
    # remove commented lines and after argument comments
    for arg in re.sub(r'\#(.*?)$',r'',arg_line).split():
        if not arg.strip():
            continue
        yield arg

# PURPOSE: number of worker threads for concurrent fits
def get_thread_count(default=None):
    """
    Number of worker threads from the ``OPTOTHERM_THREADS`` environment
    variable or the number of processors

    Parameters
    ----------
    default: int or NoneType, default None
        thread count if the environment variable is not set
    """
    value = os.environ.get('OPTOTHERM_THREADS')
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logging.warning(f'Invalid OPTOTHERM_THREADS value {value!r}')
    return default or os.cpu_count() or 1
