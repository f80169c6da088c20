from .dense import as_dense, zeros
from .tape import Tape, Node, Gradients
from .gradcheck import grad_check, GradCheckReport
from . import ops
