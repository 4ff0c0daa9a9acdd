"""Capacity bounds for noisy wireless networks via noiseless bit-pipe models.

The toolkit converts a memoryless noisy network (AWGN, q-ary symmetric, or
binary symmetric links) into noiseless bounding networks: an upper-bounding
network of point-to-point bit pipes whose capacity region contains that of the
noisy network, and a lower-bounding network of pipes and hyper-arcs whose
region is contained in it. Capacity outer and inner bounds then follow from
flow computations on the bounding networks.
"""

__version__ = "0.1.0"
