"""Presented spaces, machines and the dovetailed quantifiers over them."""
