# Node embedding
RDSA_HIDDEN_DIMS = (256, 128, 64)
RDSA_SIGMA = 0.5
# Per-dataset fusion weight overrides, keyed by meta.json "name" (lower case)
RDSA_DATASET_SIGMA = {
    'amazon-computers': 0.4,
    'computers': 0.4,
}
RDSA_GRAPH_LAYER = 'sage'
RDSA_FEATURE_NORM = 'l2'

# Objectives
RDSA_ALPHA = 0.2
RDSA_NU = 1.0
RDSA_AUX_MODE = 'labels:0.1'
RDSA_PROB_CLAMP = 1e-12

# Optimisation
RDSA_EPOCHS = 300
RDSA_LEARNING_RATE = 0.001
RDSA_MINI_BATCH_THRESHOLD = 20_000
RDSA_LOG_EVERY = 10

# Modularity matrix is never densified above this node count unless forced
RDSA_DENSE_MODULARITY_CAP = 20_000

# Noise injection gives up on rejection sampling after factor * target draws
RDSA_MAX_REJECTION_FACTOR = 100

# Batch size used when a graph exceeds the mini-batch threshold and none is given
RDSA_DEFAULT_BATCH_SIZE = 4096
