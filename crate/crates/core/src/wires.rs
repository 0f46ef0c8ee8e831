// todo: wires
