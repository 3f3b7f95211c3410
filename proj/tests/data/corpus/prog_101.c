#include <stdio.h>
void solve(int *len, int *b)
{
    int z = *len;
    *len = *b;
    *b = z;
}
int main(void)
{
    int len = 6;
    int b = 84;
    solve(&len, &b);
    printf("%d %d\n", len, b);
    return 0;
}
