#include <pybind11/pybind11.h>
PYBIND11_MODULE(_curbgraph, m) { m.doc() = "placeholder"; }
