const name = 'world';
const msg = `hello ${name ? name : 'nobody'}
and more ${(() => 1)()}
`;
const raw = `a // not a comment
/* also not */`;
