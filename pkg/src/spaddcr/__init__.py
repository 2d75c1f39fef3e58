"""Radiation-induced dark counts for silicon SPADs on satellites."""
