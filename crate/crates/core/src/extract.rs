// todo: extract
