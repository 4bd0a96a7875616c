# %% [markdown]
# # Checking backpropagation through time
#
# Compare the analytic gradients of a tiny network against central finite
# differences, parameter by parameter.

# %%
import numpy as np

from cryptolstm import neural

rng = np.random.default_rng(0)
lstm, dense = neural.init_params(input_size=1, hidden_size=4, seed=0)
x = rng.random((2, 5, 1))  # 2 sequences, 5 steps
y = rng.random(2)
drop = neural.DropoutConfig(rate=0.2, seed=0)


def loss():
    h, _ = neural.lstm_forward(x, lstm, drop, "train", np.random.default_rng(1))
    return neural.mse_loss(neural.dense_forward(h, dense), y)


h, cache = neural.lstm_forward(x, lstm, drop, "train", np.random.default_rng(1))
grads = neural.named_arrays(*neural.backward(cache, lstm, dense,
                                             neural.mse_grad(neural.dense_forward(h, dense), y)))

# %%
eps = 1e-5
for name, arr in neural.named_arrays(lstm, dense).items():
    worst = 0.0
    for idx in np.ndindex(arr.shape):
        orig = arr[idx]
        arr[idx] = orig + eps
        up = loss()
        arr[idx] = orig - eps
        down = loss()
        arr[idx] = orig
        fd = (up - down) / (2 * eps)
        worst = max(worst, abs(fd - grads[name][idx]) / max(abs(fd), abs(grads[name][idx]), 1e-8))
    print(f"{name:13s} max relative error {worst:.1e}")
