// Copyright 2026 The saf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "saf/registry.hpp"

namespace saf {

/// Shipped unstable-function database.
inline constexpr std::string_view kDefaultRegistryJson = R"json({
  "format_version": 1,
  "registry_version": "1.0.0",
  "functions": [
    {
      "name": "softmax",
      "category": "activation",
      "description": "exp(x) / sum(exp(x)) over the last axis, no max shift",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -103.97208023071289,
        "hi": 88.72283554077147,
        "text": "-103.97208023071289 <= x <= 88.72283554077147"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -130,
            -95
          ],
          [
            -95,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          90.0,
          -110.0
        ]
      }
    },
    {
      "name": "log",
      "category": "math",
      "description": "natural logarithm",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": 1.1754943508222875e-38,
        "hi": 3.4028234663852886e+38,
        "text": "1.1754944e-38 <= x <= 3.4028235e38"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -100,
            0
          ],
          [
            0,
            100
          ],
          [
            100,
            1000000.0
          ]
        ],
        "known_failures": [
          0.0,
          -1.0
        ],
        "epsilon": 1e-08
      }
    },
    {
      "name": "sigmoid",
      "category": "activation",
      "description": "exp(x) / (1 + exp(x))",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -103.97208023071289,
        "hi": 88.72283554077147,
        "text": "-103.97208023071289 <= x <= 88.72283554077147"
      },
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": 0,
          "hi": 1,
          "lo_open": true
        }
      ],
      "generation": {
        "regions": [
          [
            -130,
            -95
          ],
          [
            -95,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          90.0,
          -110.0
        ]
      }
    },
    {
      "name": "exp",
      "category": "math",
      "description": "natural exponential",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -103.97208023071289,
        "hi": 88.72,
        "text": "-103.97208 <= x < 88.72"
      },
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": 0,
          "hi": "inf",
          "lo_open": true
        }
      ],
      "generation": {
        "regions": [
          [
            -130,
            -95
          ],
          [
            -95,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          89.0,
          -105.0
        ]
      }
    },
    {
      "name": "log_softmax",
      "category": "activation",
      "description": "x - log(sum(exp(x))) over the last axis",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -87.3365447505531,
        "hi": 80.0,
        "text": "-87.336545 <= x <= 80"
      },
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 3,
          "counterpart": "log_softmax_shifted",
          "tolerance": 0.0001
        }
      ],
      "generation": {
        "regions": [
          [
            -130,
            -80
          ],
          [
            -80,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          90.0,
          -110.0
        ]
      }
    },
    {
      "name": "sqrt",
      "category": "math",
      "description": "square root",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": 0.0,
        "hi": 3.4028234663852886e+38,
        "text": "0 <= x <= 3.4028235e38"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -100,
            0
          ],
          [
            0,
            100
          ],
          [
            100,
            1000000.0
          ]
        ],
        "known_failures": [
          -1.0
        ]
      }
    },
    {
      "name": "tanh",
      "category": "activation",
      "description": "(exp(x) - exp(-x)) / (exp(x) + exp(-x))",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -88.72,
        "hi": 88.72,
        "text": "-88.72 <= x <= 88.72"
      },
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": -1,
          "hi": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -100,
            -80
          ],
          [
            -80,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          90.0,
          -90.0
        ]
      }
    },
    {
      "name": "relu",
      "category": "activation",
      "description": "max(x, 0)",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -3.4028234663852886e+38,
        "hi": 3.4028234663852886e+38,
        "text": "|x| <= 3.4028235e38"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1e+38,
            -1e+30
          ],
          [
            -1e+30,
            1e+30
          ],
          [
            1e+30,
            1e+38
          ]
        ],
        "known_failures": [
          3.5e+38,
          -3.5e+38
        ]
      }
    },
    {
      "name": "elu",
      "category": "activation",
      "description": "x if x > 0 else alpha * (exp(x) - 1)",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -103.972,
        "hi": 3.4e+38,
        "text": "-103.9720 <= x <= 3.40e38"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1e+38,
            -1e+30
          ],
          [
            -1e+30,
            1e+30
          ],
          [
            1e+30,
            1e+38
          ]
        ],
        "known_failures": [
          3.5e+38,
          -3.5e+38
        ],
        "params": {
          "alpha": 1.0
        }
      }
    },
    {
      "name": "softplus",
      "category": "activation",
      "description": "log(1 + exp(x))",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -3.4028234663852886e+38,
        "hi": 88.72,
        "text": "-3.4028235e38 <= x <= 88.72"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1e+38,
            -1e+30
          ],
          [
            -1e+30,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          90.0,
          -3.5e+38
        ]
      }
    },
    {
      "name": "rsqrt",
      "category": "math",
      "description": "1 / sqrt(x)",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": 1.1754943508222875e-38,
        "hi": 3.4028234663852886e+38,
        "text": "1.1754944e-38 <= x <= 3.4028235e38"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -100,
            0
          ],
          [
            0,
            100
          ],
          [
            100,
            1000000.0
          ]
        ],
        "known_failures": [
          0.0,
          -1.0
        ],
        "epsilon": 1e-08
      }
    },
    {
      "name": "div",
      "category": "math",
      "description": "element-wise a / b",
      "implemented": true,
      "arity": 2,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "operand_regions": [
          [
            [
              1,
              100
            ],
            [
              100,
              10000.0
            ]
          ],
          [
            [
              -1e-38,
              1e-38
            ],
            [
              -1,
              1
            ],
            [
              1,
              100
            ]
          ]
        ],
        "known_failures": [
          0.0,
          [
            5.0,
            0.0
          ],
          [
            -5.0,
            0.0
          ],
          [
            50.0,
            0.0
          ],
          [
            -50.0,
            0.0
          ],
          [
            500.0,
            0.0
          ]
        ],
        "mutations": [
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 20,
            "scale": 1e-36
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 20,
            "scale": 1e-30
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 20,
            "scale": 1e-20
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 20,
            "scale": 1e-12
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 20,
            "scale": 1e-07
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 20,
            "scale": 0.0001
          }
        ]
      }
    },
    {
      "name": "linear",
      "category": "layer",
      "description": "x @ W^T + b",
      "implemented": true,
      "arity": 3,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1e+19,
            -10000000000.0
          ],
          [
            -10000000000.0,
            10000000000.0
          ],
          [
            10000000000.0,
            1e+19
          ]
        ],
        "operand_shapes": [
          "square",
          "square",
          "vector"
        ],
        "known_failures": [
          1e+20,
          -1e+20
        ]
      }
    },
    {
      "name": "matmul",
      "category": "linalg",
      "description": "matrix product",
      "implemented": true,
      "arity": 2,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1e+19,
            -10000000000.0
          ],
          [
            -10000000000.0,
            10000000000.0
          ],
          [
            10000000000.0,
            1e+19
          ]
        ],
        "known_failures": [
          1e+20,
          -1e+20
        ]
      }
    },
    {
      "name": "mean",
      "category": "reduction",
      "description": "arithmetic mean of all elements",
      "implemented": true,
      "arity": 1,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1e+38,
            -1e+30
          ],
          [
            -1e+30,
            1e+30
          ],
          [
            1e+30,
            1e+38
          ]
        ],
        "known_failures": [
          3e+38,
          -3e+38
        ]
      }
    },
    {
      "name": "reciprocal",
      "category": "math",
      "description": "1 / x",
      "implemented": true,
      "arity": 1,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1,
            -1e-39
          ],
          [
            -1e-39,
            1e-39
          ],
          [
            1e-39,
            1
          ]
        ],
        "known_failures": [
          0.0
        ],
        "epsilon": 1e-08
      }
    },
    {
      "name": "cosine_similarity",
      "category": "distance",
      "description": "row-wise cosine similarity with each norm clamped below at eps",
      "implemented": true,
      "arity": 2,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": -1,
          "hi": 1
        },
        {
          "type": 5,
          "counterpart": "cosine_similarity_reference",
          "tolerance": 1e-06
        }
      ],
      "generation": {
        "operand_regions": [
          [
            [
              -10000.0,
              10000.0
            ]
          ],
          [
            [
              -1e-08,
              1e-08
            ],
            [
              -1e-06,
              1e-06
            ],
            [
              -1,
              1
            ]
          ]
        ],
        "params": {
          "eps": 1e-08
        },
        "known_failures": [
          [
            100.0,
            3e-09
          ],
          [
            1000.0,
            -3e-09
          ],
          [
            5000.0,
            2e-09
          ],
          [
            -2000.0,
            4e-09
          ],
          [
            300.0,
            -1e-09
          ]
        ],
        "mutations": [
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 30,
            "scale": 1e-09
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 30,
            "scale": 3e-09
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 30,
            "scale": 1e-08
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 30,
            "scale": 1e-07
          },
          {
            "method": "random",
            "rate": 1.0,
            "max_steps": 30,
            "scale": 3e-07
          }
        ]
      }
    },
    {
      "name": "acos",
      "category": "math",
      "description": "inverse cosine",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -1.0,
        "hi": 1.0,
        "text": "-1 <= x <= 1"
      },
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": 0,
          "hi": 3.1415927410125732
        }
      ],
      "generation": {
        "regions": [
          [
            -3,
            -1
          ],
          [
            -1,
            1
          ],
          [
            1,
            3
          ]
        ],
        "known_failures": [
          1.5,
          -1.5
        ]
      }
    },
    {
      "name": "cosh",
      "category": "math",
      "description": "(exp(x) + exp(-x)) / 2",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -88.72,
        "hi": 88.72,
        "text": "-88.72 <= x <= 88.72"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -100,
            -80
          ],
          [
            -80,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          90.0,
          -90.0
        ]
      }
    },
    {
      "name": "sinh",
      "category": "math",
      "description": "(exp(x) - exp(-x)) / 2",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -88.72,
        "hi": 88.72,
        "text": "-88.72 <= x <= 88.72"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -100,
            -80
          ],
          [
            -80,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          90.0,
          -90.0
        ]
      }
    },
    {
      "name": "square",
      "category": "math",
      "description": "x * x",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -1.8446742e+19,
        "hi": 1.8446742e+19,
        "text": "|x| <= 1.8446742e19"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -2e+19,
            -1e+19
          ],
          [
            -1e+19,
            1e+19
          ],
          [
            1e+19,
            2e+19
          ]
        ],
        "known_failures": [
          2e+19,
          -2e+19
        ]
      }
    },
    {
      "name": "pow",
      "category": "math",
      "description": "x ** exponent with a per-call-site exponent",
      "implemented": true,
      "arity": 1,
      "safe_condition": {
        "lo": -6900000000000.0,
        "hi": 6900000000000.0,
        "text": "|x| <= 6.9e12 (exponent 3)"
      },
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -8000000000000.0,
            -5000000000000.0
          ],
          [
            -5000000000000.0,
            5000000000000.0
          ],
          [
            5000000000000.0,
            8000000000000.0
          ]
        ],
        "known_failures": [
          7000000000000.0,
          -7000000000000.0
        ],
        "params": {
          "exponent": 3.0
        }
      }
    },
    {
      "name": "sum",
      "category": "reduction",
      "description": "sum of all elements",
      "implemented": true,
      "arity": 1,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1e+38,
            -1e+30
          ],
          [
            -1e+30,
            1e+30
          ],
          [
            1e+30,
            1e+38
          ]
        ],
        "known_failures": [
          3e+38,
          -3e+38
        ]
      }
    },
    {
      "name": "cross_entropy",
      "category": "loss",
      "description": "mean over rows of -log(softmax(z)[label]), softmax unshifted",
      "implemented": true,
      "arity": 1,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -130,
            -95
          ],
          [
            -95,
            80
          ],
          [
            80,
            100
          ]
        ],
        "known_failures": [
          90.0,
          -110.0
        ],
        "params": {
          "labels": 0
        }
      }
    },
    {
      "name": "conv2d",
      "category": "layer",
      "description": "single-channel valid cross-correlation",
      "implemented": true,
      "arity": 2,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "generation": {
        "regions": [
          [
            -1e+19,
            -10000000000.0
          ],
          [
            -10000000000.0,
            10000000000.0
          ],
          [
            10000000000.0,
            1e+19
          ]
        ],
        "known_failures": [
          1e+20,
          -1e+20
        ]
      }
    },
    {
      "name": "matrix_inverse",
      "category": "linalg",
      "description": "Gauss-Jordan inverse with partial pivoting",
      "implemented": false,
      "extended": true,
      "arity": 1,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 4,
          "counterpart": "cholesky_inverse",
          "tolerance": 1e-06
        }
      ],
      "generation": {
        "regions": [
          [
            -1,
            1
          ],
          [
            -1e-06,
            1e-06
          ],
          [
            1,
            10
          ]
        ]
      }
    },
    {
      "name": "determinant",
      "category": "linalg",
      "description": "LU determinant with partial pivoting",
      "implemented": false,
      "extended": true,
      "arity": 1,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 4,
          "counterpart": "cholesky_determinant",
          "tolerance": 1e-06
        }
      ],
      "generation": {
        "regions": [
          [
            -1,
            1
          ],
          [
            -1e-06,
            1e-06
          ],
          [
            1,
            10
          ]
        ]
      }
    },
    {
      "name": "remainder",
      "category": "math",
      "description": "floored remainder x mod divisor, sign of the divisor",
      "implemented": false,
      "extended": true,
      "arity": 1,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 6,
          "metric": "integer",
          "tolerance": 1e-06
        }
      ],
      "generation": {
        "regions": [
          [
            -20,
            20
          ],
          [
            20,
            10000.0
          ],
          [
            10000.0,
            10000000000.0
          ]
        ],
        "params": {
          "divisor": 53.0
        },
        "known_failures": [
          1933053808.0
        ]
      }
    },
    {
      "name": "selu",
      "category": "activation",
      "description": "scale * elu(x, alpha) with fixed constants",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ],
      "safe_condition": {
        "lo": -103.972,
        "hi": 3.4e+38,
        "text": "-103.9720 <= x <= 3.40e38"
      }
    },
    {
      "name": "eig",
      "category": "linalg",
      "description": "eigendecomposition",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 4,
          "counterpart": "eig_symmetric"
        }
      ]
    },
    {
      "name": "svd",
      "category": "linalg",
      "description": "singular value decomposition",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 4,
          "counterpart": "svd_jacobi"
        }
      ]
    },
    {
      "name": "glorot_uniform",
      "category": "init",
      "description": "Glorot uniform initializer",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "linear_solver",
      "category": "linalg",
      "description": "solve A x = b",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 4,
          "counterpart": "qr_solve"
        }
      ]
    },
    {
      "name": "fft",
      "category": "signal",
      "description": "fast Fourier transform",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 5,
          "counterpart": "dft_reference"
        }
      ]
    },
    {
      "name": "polynomial_roots",
      "category": "math",
      "description": "roots of a polynomial",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 4,
          "counterpart": "companion_eig"
        }
      ]
    },
    {
      "name": "pca",
      "category": "statistics",
      "description": "principal component analysis",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 4,
          "counterpart": "svd_jacobi"
        }
      ]
    },
    {
      "name": "sin",
      "category": "math",
      "description": "sine",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": -1,
          "hi": 1
        }
      ]
    },
    {
      "name": "cos",
      "category": "math",
      "description": "cosine",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": -1,
          "hi": 1
        }
      ]
    },
    {
      "name": "tan",
      "category": "math",
      "description": "tangent",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "asin",
      "category": "math",
      "description": "inverse sine",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": -1.5707963705062866,
          "hi": 1.5707963705062866
        }
      ]
    },
    {
      "name": "atan",
      "category": "math",
      "description": "inverse tangent",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": -1.5707963705062866,
          "hi": 1.5707963705062866
        }
      ]
    },
    {
      "name": "atanh",
      "category": "math",
      "description": "inverse hyperbolic tangent",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "log1p",
      "category": "math",
      "description": "log(1 + x)",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 3,
          "counterpart": "log1p_series"
        }
      ]
    },
    {
      "name": "expm1",
      "category": "math",
      "description": "exp(x) - 1",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 3,
          "counterpart": "expm1_series"
        }
      ]
    },
    {
      "name": "logsumexp",
      "category": "reduction",
      "description": "log(sum(exp(x)))",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 3,
          "counterpart": "logsumexp_shifted"
        }
      ]
    },
    {
      "name": "log_sigmoid",
      "category": "activation",
      "description": "log(sigmoid(x))",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 3,
          "counterpart": "log_sigmoid_softplus"
        }
      ]
    },
    {
      "name": "gelu",
      "category": "activation",
      "description": "Gaussian error linear unit",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "l2_norm",
      "category": "reduction",
      "description": "sqrt(sum(x * x))",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 3,
          "counterpart": "l2_norm_scaled"
        }
      ]
    },
    {
      "name": "batch_norm",
      "category": "layer",
      "description": "batch normalization",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "layer_norm",
      "category": "layer",
      "description": "layer normalization",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "variance",
      "category": "statistics",
      "description": "variance",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 4,
          "counterpart": "welford_variance"
        }
      ]
    },
    {
      "name": "std",
      "category": "statistics",
      "description": "standard deviation",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 4,
          "counterpart": "welford_variance"
        }
      ]
    },
    {
      "name": "kl_div",
      "category": "loss",
      "description": "Kullback-Leibler divergence",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "nll_loss",
      "category": "loss",
      "description": "negative log-likelihood",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "binary_cross_entropy",
      "category": "loss",
      "description": "binary cross entropy on probabilities",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "erf",
      "category": "math",
      "description": "error function",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        },
        {
          "type": 2,
          "lo": -1,
          "hi": 1
        }
      ]
    },
    {
      "name": "erfinv",
      "category": "math",
      "description": "inverse error function",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "lgamma",
      "category": "math",
      "description": "log-gamma",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "digamma",
      "category": "math",
      "description": "digamma",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "cholesky",
      "category": "linalg",
      "description": "Cholesky factorization",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    },
    {
      "name": "qr",
      "category": "linalg",
      "description": "QR factorization",
      "implemented": false,
      "oracle_bindings": [
        {
          "type": 1
        }
      ]
    }
  ]
}
)json";

inline const Registry& default_registry() {
  static const Registry reg = registry_parse(kDefaultRegistryJson);
  return reg;
}

}  // namespace saf
