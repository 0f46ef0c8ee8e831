// todo: witness
