#!/usr/bin/env python3


def base():
    '''
    Returns the hexadecimal value of the grid colour shared by all palettes

    Parameters
    ----------
    None

    Returns
    -------
    dict
        A dictionary containing the grid colour
    '''

    return {'grid': '#eae2ea'}


def CBSafe():
    '''
    Returns the hexadecimal values for a colour blind safe palette

    Parameters
    ----------
    None

    Returns
    -------
    dict
        A dictionary containing the hexadecimal values for the colours used
        for each series in the scaling plot
    '''

    b = base()
    b.update({'mean': "#0038a2",
              'median': "#589aab",
              'q95': "#56ae6c",
              'upper': "#7066bc",
              'bound': "#a22c49",
              'bound_corollary': "#e57700",
              'rate': "#888988"})
    return (b)


def Bright():
    '''
    Returns the hexadecimal values for a bright palette

    Parameters
    ----------
    None

    Returns
    -------
    dict
        A dictionary containing the hexadecimal values for the colours used
        for each series in the scaling plot
    '''

    b = base()
    b.update({'mean': "#1e90ff",
              'median': "#00ced1",
              'q95': "#32cd32",
              'upper': "#9370db",
              'bound': "#ff0000",
              'bound_corollary': "#ffa500",
              'rate': "#808080"})
    return (b)
