function loops(list, obj) {
  let total = 0;
  for (let i = 0; i < list.length; i++) total += list[i];
  for (const k in obj) total += obj[k];
  for (const v of list) total += v;
  while (total > 100) total -= 100;
  do {
    total++;
  } while (total < 10);
  return total;
}
