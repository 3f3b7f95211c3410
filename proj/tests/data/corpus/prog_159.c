#include <stdio.h>
int check(int limit[], int val)
{
    int c = limit[0];
    int tmp;
    for (tmp = 1; tmp < val; tmp++) {
        if (limit[tmp] > c) {
            c = limit[tmp];
        }
    }
    return c;
}
int main(void)
{
    int limit[4] = {0, 34, 20, -31};
    int val = 4;
    printf("%d\n", check(limit, val));
    return 0;
}
