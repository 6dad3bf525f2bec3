"""hekl: RNS-CKKS homomorphic encryption with an instrumented NTT kernel ladder."""
