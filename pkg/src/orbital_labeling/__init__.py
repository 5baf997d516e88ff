"""Orbital boundary labeling: circular-arc labels on a disk boundary joined to
interior features by crossing-free orbital-radial leaders of minimum length."""
